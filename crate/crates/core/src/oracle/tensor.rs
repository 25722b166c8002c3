//! Sum-product contraction over factored transition kernels.
//!
//! The induced chain's transition factorizes per agent, so applying `P` or
//! `P^T` to a vector never needs the |Z| x |Z| matrix: we sweep the agents
//! in index order, multiplying one local factor at a time into a working
//! table and summing out coordinates as soon as no remaining factor reads
//! them. On banded graphs (lines, thin grids) the working table stays near
//! |Z| times one neighborhood.

use std::collections::HashSet;

/// A coordinate of the working table: an agent's pair either at the current
/// step (`Old`) or the next (`New`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum Var {
    Old(usize),
    New(usize),
}

#[derive(Debug, Clone)]
pub(crate) struct Table {
    pub vars: Vec<Var>,
    pub dims: Vec<usize>,
    pub data: Vec<f64>,
}

impl Table {
    pub fn new(vars: Vec<Var>, dims: Vec<usize>, data: Vec<f64>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), data.len());
        debug_assert_eq!(vars.len(), dims.len());
        Self { vars, dims, data }
    }

    fn dim_of(&self, v: Var) -> Option<usize> {
        self.vars.iter().position(|&x| x == v).map(|k| self.dims[k])
    }

    fn stride_of(&self, v: Var) -> usize {
        match self.vars.iter().position(|&x| x == v) {
            Some(k) => self.dims[..k].iter().product(),
            None => 0,
        }
    }

    /// Reorder coordinates to `order` (a permutation of `self.vars`).
    pub fn permuted(&self, order: &[Var]) -> Table {
        if order == self.vars.as_slice() {
            return self.clone();
        }
        let dims: Vec<usize> = order
            .iter()
            .map(|&v| self.dim_of(v).expect("var present"))
            .collect();
        let src_strides: Vec<usize> = order.iter().map(|&v| self.stride_of(v)).collect();
        let len = self.data.len();
        let mut out = vec![0.0; len];
        let mut counters = vec![0usize; order.len()];
        let mut src = 0usize;
        for slot in out.iter_mut() {
            *slot = self.data[src];
            for k in 0..order.len() {
                counters[k] += 1;
                src += src_strides[k];
                if counters[k] < dims[k] {
                    break;
                }
                counters[k] = 0;
                src -= dims[k] * src_strides[k];
            }
        }
        Table::new(order.to_vec(), dims, out)
    }
}

/// Multiply two tables and sum out `sum_vars` in one pass.
///
/// Output coordinate order: `t`'s kept vars in `t` order, then `f`'s vars
/// not already present, in `f` order. Summed vars that live in `t` are
/// iterated innermost so the hot loop walks `t` with stride one.
pub(crate) fn contract(t: &Table, f: &Table, sum_vars: &[Var]) -> Table {
    let sum_set: HashSet<Var> = sum_vars.iter().copied().collect();
    debug_assert!(sum_vars
        .iter()
        .all(|&v| t.vars.contains(&v) || f.vars.contains(&v)));

    let mut out_vars: Vec<Var> = t
        .vars
        .iter()
        .copied()
        .filter(|v| !sum_set.contains(v))
        .collect();
    for &v in &f.vars {
        if !sum_set.contains(&v) && !out_vars.contains(&v) {
            out_vars.push(v);
        }
    }
    let out_dims: Vec<usize> = out_vars
        .iter()
        .map(|&v| t.dim_of(v).or_else(|| f.dim_of(v)).expect("var in t or f"))
        .collect();
    let out_len: usize = out_dims.iter().product();

    // loop order: summed vars from t (t order) first, then summed vars only
    // in f, then output vars in output order
    let mut loop_vars: Vec<Var> = t
        .vars
        .iter()
        .copied()
        .filter(|v| sum_set.contains(v))
        .collect();
    for &v in &f.vars {
        if sum_set.contains(&v) && !loop_vars.contains(&v) {
            loop_vars.push(v);
        }
    }
    loop_vars.extend(out_vars.iter().copied());

    let dims: Vec<usize> = loop_vars
        .iter()
        .map(|&v| t.dim_of(v).or_else(|| f.dim_of(v)).expect("var in t or f"))
        .collect();
    let ts: Vec<usize> = loop_vars.iter().map(|&v| t.stride_of(v)).collect();
    let fs: Vec<usize> = loop_vars.iter().map(|&v| f.stride_of(v)).collect();
    let out_table = Table::new(out_vars.clone(), out_dims, vec![0.0; out_len]);
    let os: Vec<usize> = loop_vars.iter().map(|&v| out_table.stride_of(v)).collect();

    let mut out = out_table.data;
    let d0 = dims[0];
    let (t0, f0, o0) = (ts[0], fs[0], os[0]);
    let rank = loop_vars.len();
    let mut counters = vec![0usize; rank];
    let (mut pt, mut pf, mut po) = (0usize, 0usize, 0usize);
    let outer: usize = dims[1..].iter().product();
    let tdata = &t.data;
    let fdata = &f.data;
    for _ in 0..outer.max(1) {
        if o0 == 0 {
            let mut acc = 0.0;
            let mut it = pt;
            let mut if_ = pf;
            for _ in 0..d0 {
                acc += tdata[it] * fdata[if_];
                it += t0;
                if_ += f0;
            }
            out[po] += acc;
        } else {
            let mut it = pt;
            let mut if_ = pf;
            let mut io = po;
            for _ in 0..d0 {
                out[io] += tdata[it] * fdata[if_];
                it += t0;
                if_ += f0;
                io += o0;
            }
        }
        // odometer over the outer vars
        for k in 1..rank {
            counters[k] += 1;
            pt += ts[k];
            pf += fs[k];
            po += os[k];
            if counters[k] < dims[k] {
                break;
            }
            counters[k] = 0;
            pt -= dims[k] * ts[k];
            pf -= dims[k] * fs[k];
            po -= dims[k] * os[k];
        }
    }
    Table::new(out_vars, out_table.dims, out)
}
