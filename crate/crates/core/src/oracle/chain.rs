//! The policy-induced Markov chain on the joint state-action space, with a
//! dense representation for small instances and a factored sum-product
//! representation above the dense limit.

use crate::error::{Error, Result};
use crate::mdp::FactoredMdp;
use crate::policy::SoftmaxPolicy;

use super::space::JointSpace;
use super::tensor::{contract, Table, Var};
use super::OracleOptions;

pub struct InducedChain {
    space: JointSpace,
    repr: ChainRepr,
}

enum ChainRepr {
    Dense(Vec<f64>),
    Factored(FactoredChain),
}

impl InducedChain {
    pub fn new(mdp: &FactoredMdp, policy: &SoftmaxPolicy, opts: &OracleOptions) -> Result<Self> {
        let space = JointSpace::of(mdp, opts.size_guard)?;
        let repr = if space.size() <= opts.dense_limit {
            ChainRepr::Dense(build_dense(mdp, policy, &space))
        } else {
            ChainRepr::Factored(FactoredChain::new(mdp, policy, &space))
        };
        Ok(Self { space, repr })
    }

    pub fn space(&self) -> &JointSpace {
        &self.space
    }

    pub fn size(&self) -> usize {
        self.space.size()
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.repr, ChainRepr::Dense(_))
    }

    /// Row-stochastic matrix, available below the dense limit.
    pub fn dense(&self) -> Option<&[f64]> {
        match &self.repr {
            ChainRepr::Dense(p) => Some(p),
            ChainRepr::Factored(_) => None,
        }
    }

    /// `x' = P^T x`: push a distribution one step forward.
    pub fn push_distribution(&self, x: &[f64]) -> Vec<f64> {
        match &self.repr {
            ChainRepr::Dense(p) => {
                let n = self.size();
                let mut out = vec![0.0; n];
                for z in 0..n {
                    let w = x[z];
                    if w != 0.0 {
                        let row = &p[z * n..(z + 1) * n];
                        for (o, r) in out.iter_mut().zip(row) {
                            *o += w * r;
                        }
                    }
                }
                out
            }
            ChainRepr::Factored(f) => f.push_distribution(x),
        }
    }

    /// `v' = P v`: one-step expectation of a value vector.
    pub fn apply_values(&self, v: &[f64]) -> Vec<f64> {
        match &self.repr {
            ChainRepr::Dense(p) => {
                let n = self.size();
                let mut out = vec![0.0; n];
                for z in 0..n {
                    let row = &p[z * n..(z + 1) * n];
                    out[z] = row.iter().zip(v).map(|(a, b)| a * b).sum();
                }
                out
            }
            ChainRepr::Factored(f) => f.apply_values(v),
        }
    }

    /// Stationary distribution: direct linear solve on the dense path,
    /// power iteration on the factored path. Either way the result is
    /// validated to residual `1e-12` and strict positivity.
    pub fn stationary_distribution(&self) -> Result<Vec<f64>> {
        let pi = match &self.repr {
            ChainRepr::Dense(p) => {
                validate_ergodic_support(p, self.size())?;
                stationary_direct(p, self.size())?
            }
            ChainRepr::Factored(_) => self.stationary_power()?,
        };
        let residual = l1_residual(self, &pi);
        if residual > 1e-12 {
            return Err(Error::NonConverged(format!(
                "stationary residual {residual:.3e} above 1e-12"
            )));
        }
        if pi.iter().any(|&p| p <= 0.0) {
            return Err(Error::NonErgodic(
                "stationary distribution has a zero entry".into(),
            ));
        }
        Ok(pi)
    }

    /// Power iteration with a lazy-chain fallback for slowly mixing or
    /// nearly periodic instances.
    fn stationary_power(&self) -> Result<Vec<f64>> {
        let n = self.size();
        let mut x = vec![1.0 / n as f64; n];
        let mut lazy = false;
        let mut last_residual = f64::INFINITY;
        let max_iters = 200_000usize;
        let mut iter = 0usize;
        while iter < max_iters {
            for _ in 0..16 {
                let mut y = self.push_distribution(&x);
                if lazy {
                    for (yk, xk) in y.iter_mut().zip(&x) {
                        *yk = 0.5 * (*yk + xk);
                    }
                }
                let sum: f64 = y.iter().sum();
                for yk in y.iter_mut() {
                    *yk /= sum;
                }
                x = y;
                iter += 1;
            }
            let residual = l1_residual(self, &x);
            if residual <= 1e-13 {
                return Ok(x);
            }
            if !lazy && residual > 0.9 * last_residual {
                // stalling; switch to the averaged chain, same fixed point
                lazy = true;
            }
            last_residual = residual;
        }
        Err(Error::NonConverged(format!(
            "power iteration at residual {last_residual:.3e} after {max_iters} steps"
        )))
    }

    /// `mu_D`: the weighted operator norm of `P - 1 pi^T`, computed from the
    /// equivalent symmetric eigenproblem. Dense path only.
    pub fn mixing_norm(&self, pi: &[f64]) -> Result<f64> {
        let n = self.size();
        let p = self.dense().ok_or(Error::SizeGuard {
            size: n as u128,
            limit: 0,
        })?;
        // m = D^{1/2} (P - 1 pi^T) D^{-1/2}; mu_D = sigma_max(m)
        let sqrt_pi: Vec<f64> = pi.iter().map(|&x| x.sqrt()).collect();
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = sqrt_pi[i] * (p[i * n + j] - pi[j]) / sqrt_pi[j];
            }
        }
        // s = m^T m, symmetric PSD
        let mut s = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += m[k * n + i] * m[k * n + j];
                }
                s[i * n + j] = acc;
                s[j * n + i] = acc;
            }
        }
        let lambda = super::linalg::symmetric_max_eigenvalue(s, n).max(0.0);
        Ok(lambda.sqrt())
    }
}

fn l1_residual(chain: &InducedChain, pi: &[f64]) -> f64 {
    chain
        .push_distribution(pi)
        .iter()
        .zip(pi)
        .map(|(a, b)| (a - b).abs())
        .sum()
}

fn build_dense(mdp: &FactoredMdp, policy: &SoftmaxPolicy, space: &JointSpace) -> Vec<f64> {
    let n = space.size();
    let agents = mdp.num_agents();
    // per-agent action distributions for every next state
    let dists: Vec<Vec<Vec<f64>>> = (0..agents)
        .map(|i| {
            (0..mdp.space(i).state_count)
                .map(|s| policy.action_distribution(i, s))
                .collect()
        })
        .collect();
    let mut p = vec![0.0; n * n];
    let mut local = vec![0.0f64; 0];
    for z in 0..n {
        let (state, action) = space.decode(z);
        // row = tensor product of per-agent next-pair distributions
        let row = &mut p[z * n..(z + 1) * n];
        row[0] = 1.0;
        let mut built = 1usize;
        for i in 0..agents {
            let nbr: Vec<usize> = mdp.graph().neighbors(i).iter().map(|&j| state[j]).collect();
            let krow = mdp.kernel(i).row(
                mdp.kernel(i)
                    .row_of(&nbr, action[i])
                    .expect("validated indices"),
            );
            let sp = mdp.space(i);
            local.clear();
            local.reserve(sp.pair_count());
            for s_next in 0..sp.state_count {
                for a_next in 0..sp.action_count {
                    local.push(krow[s_next] * dists[i][s_next][a_next]);
                }
            }
            // wait with little-endian packing: pair = a + s*|A|, so action
            // varies fastest; `local` above is built in that order
            for k in (0..built).rev() {
                let base = row[k];
                for (d, &q) in local.iter().enumerate() {
                    row[k + built * d] = base * q;
                }
            }
            built *= sp.pair_count();
        }
    }
    p
}

/// Single recurrent class + aperiodicity check on the support graph.
fn validate_ergodic_support(p: &[f64], n: usize) -> Result<()> {
    let support = |z: usize| {
        p[z * n..(z + 1) * n]
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.0)
            .map(|(j, _)| j)
    };
    // strong connectivity: forward and backward reachability from state 0
    let mut fwd = vec![false; n];
    let mut stack = vec![0usize];
    fwd[0] = true;
    while let Some(z) = stack.pop() {
        for j in support(z) {
            if !fwd[j] {
                fwd[j] = true;
                stack.push(j);
            }
        }
    }
    if fwd.iter().any(|&b| !b) {
        return Err(Error::NonErgodic(
            "support graph is not strongly connected (unreachable states)".into(),
        ));
    }
    let mut bwd = vec![false; n];
    let mut stack = vec![0usize];
    bwd[0] = true;
    while let Some(z) = stack.pop() {
        for i in 0..n {
            if !bwd[i] && p[i * n + z] > 0.0 {
                bwd[i] = true;
                stack.push(i);
            }
        }
    }
    if bwd.iter().any(|&b| !b) {
        return Err(Error::NonErgodic(
            "support graph is not strongly connected (multiple closed classes)".into(),
        ));
    }
    // aperiodicity heuristic: gcd of cycle length hints via BFS levels
    let mut level = vec![usize::MAX; n];
    level[0] = 0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    let mut g = 0usize;
    while let Some(z) = queue.pop_front() {
        for j in support(z) {
            if level[j] == usize::MAX {
                level[j] = level[z] + 1;
                queue.push_back(j);
            } else {
                let diff = (level[z] + 1).abs_diff(level[j]);
                g = gcd(g, diff);
            }
        }
    }
    if g != 1 {
        return Err(Error::NonErgodic(format!("support graph has period {g}")));
    }
    Ok(())
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Solve `P^T pi = pi`, `1^T pi = 1` by replacing the last balance equation
/// with the normalization.
fn stationary_direct(p: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = p[j * n + i] - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..n {
        a[(n - 1) * n + j] = 1.0;
    }
    let mut b = vec![0.0; n];
    b[n - 1] = 1.0;
    super::linalg::solve_dense(&mut a, &mut b)
}

/// Factored representation: one sum-product factor per agent.
struct FactoredChain {
    factors: Vec<Table>,
    /// Old vars eliminated after each forward step.
    forward_elim: Vec<Vec<Var>>,
    num_agents: usize,
    zdims: Vec<usize>,
}

impl FactoredChain {
    fn new(mdp: &FactoredMdp, policy: &SoftmaxPolicy, space: &JointSpace) -> Self {
        let n = mdp.num_agents();
        let zdims = space.zdims().to_vec();
        let mut factors = Vec::with_capacity(n);
        for i in 0..n {
            let nbrs = mdp.graph().neighbors(i);
            let mut vars: Vec<Var> = nbrs.iter().map(|&j| Var::Old(j)).collect();
            vars.push(Var::New(i));
            let mut dims: Vec<usize> = nbrs.iter().map(|&j| zdims[j]).collect();
            dims.push(zdims[i]);
            let sp = mdp.space(i);
            let dists: Vec<Vec<f64>> = (0..sp.state_count)
                .map(|s| policy.action_distribution(i, s))
                .collect();
            let len: usize = dims.iter().product();
            let mut data = vec![0.0; len];
            // little-endian over (z_{N_i} ascending, z'_i)
            let mut tuple = vec![0usize; nbrs.len() + 1];
            for (flat, slot) in data.iter_mut().enumerate() {
                let mut rem = flat;
                for (k, &d) in dims.iter().enumerate() {
                    tuple[k] = rem % d;
                    rem /= d;
                }
                let nbr_states: Vec<usize> = (0..nbrs.len())
                    .map(|k| tuple[k] / mdp.space(nbrs[k]).action_count)
                    .collect();
                let own_pos = nbrs.iter().position(|&j| j == i).expect("self in N_i");
                let a_i = tuple[own_pos] % sp.action_count;
                let znext = tuple[nbrs.len()];
                let (s_next, a_next) = (znext / sp.action_count, znext % sp.action_count);
                let krow = mdp
                    .kernel(i)
                    .row(mdp.kernel(i).row_of(&nbr_states, a_i).expect("in range"));
                *slot = krow[s_next] * dists[s_next][a_next];
            }
            factors.push(Table::new(vars, dims, data));
        }
        // Old(j) can be summed out once every factor reading it has been
        // applied, i.e. after step max(N_j).
        let mut forward_elim = vec![Vec::new(); n];
        for j in 0..n {
            let last = *mdp.graph().neighbors(j).iter().max().expect("nonempty");
            forward_elim[last].push(Var::Old(j));
        }
        Self {
            factors,
            forward_elim,
            num_agents: n,
            zdims,
        }
    }

    fn push_distribution(&self, x: &[f64]) -> Vec<f64> {
        let vars: Vec<Var> = (0..self.num_agents).map(Var::Old).collect();
        let mut table = Table::new(vars, self.zdims.clone(), x.to_vec());
        for i in 0..self.num_agents {
            table = contract(&table, &self.factors[i], &self.forward_elim[i]);
        }
        let order: Vec<Var> = (0..self.num_agents).map(Var::New).collect();
        table.permuted(&order).data
    }

    fn apply_values(&self, v: &[f64]) -> Vec<f64> {
        let vars: Vec<Var> = (0..self.num_agents).map(Var::New).collect();
        let mut table = Table::new(vars, self.zdims.clone(), v.to_vec());
        for i in 0..self.num_agents {
            table = contract(&table, &self.factors[i], &[Var::New(i)]);
        }
        let order: Vec<Var> = (0..self.num_agents).map(Var::Old).collect();
        table.permuted(&order).data
    }
}
