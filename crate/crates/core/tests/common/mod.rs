#![allow(dead_code)]

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use rrcr::graph::{Graph, Vertex};
use rrcr::rng::RngSeed;
use rrcr::sampler::enumerate::{list_graphs_with_degrees, DegreeSequence};

type Q = BigRational;
/// Coefficients, lowest degree first.
type Poly = Vec<Q>;

/// `det(xI − A)` by Faddeev–LeVerrier, exact over the integers.
pub fn char_poly(g: &Graph) -> Vec<BigInt> {
    let n = g.n();
    let a: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from(g.has_edge(i as Vertex, j as Vertex) as i32)).collect())
        .collect();
    let mut c = vec![BigInt::zero(); n + 1];
    c[n] = BigInt::one();
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigInt::zero();
                for l in 0..n {
                    if !a[i][l].is_zero() {
                        s += &m[l][j];
                    }
                }
                if i == j {
                    s += &c[n - k + 1];
                }
                next[i][j] = s;
            }
        }
        m = next;
        let mut trace = BigInt::zero();
        for i in 0..n {
            for l in 0..n {
                if !a[i][l].is_zero() {
                    trace += &m[l][i];
                }
            }
        }
        c[n - k] = -trace / BigInt::from(k);
    }
    c
}

fn trim(mut p: Poly) -> Poly {
    while p.len() > 1 && p.last().unwrap().is_zero() {
        p.pop();
    }
    p
}

fn eval(p: &Poly, x: &Q) -> Q {
    p.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
}

fn deriv(p: &Poly) -> Poly {
    trim((1..p.len()).map(|i| &p[i] * Q::from_integer(BigInt::from(i))).collect())
}

fn divrem(p: &Poly, q: &Poly) -> (Poly, Poly) {
    let mut r = p.clone();
    let dq = q.len() - 1;
    if r.len() <= dq {
        return (vec![Q::zero()], r);
    }
    let mut quot = vec![Q::zero(); r.len() - dq];
    let lead = q.last().unwrap().clone();
    for i in (dq..r.len()).rev() {
        let f = &r[i] / &lead;
        if f.is_zero() {
            continue;
        }
        for j in 0..=dq {
            r[i - dq + j] = &r[i - dq + j] - &f * &q[j];
        }
        quot[i - dq] = f;
    }
    let r = trim(r[..dq.max(1)].to_vec());
    (trim(quot), r)
}

fn is_zero(p: &Poly) -> bool {
    p.iter().all(Zero::is_zero)
}

fn gcd(a: &Poly, b: &Poly) -> Poly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !is_zero(&b) {
        let r = divrem(&a, &b).1;
        a = b;
        b = r;
    }
    let lead = a.last().unwrap().clone();
    a.iter().map(|c| c / &lead).collect()
}

/// Sturm chain of a square-free polynomial.
fn sturm(p: &Poly) -> Vec<Poly> {
    let mut chain = vec![p.clone(), deriv(p)];
    while chain.last().unwrap().len() > 1 {
        let k = chain.len();
        let r = divrem(&chain[k - 2], &chain[k - 1]).1;
        if is_zero(&r) {
            break;
        }
        chain.push(r.into_iter().map(|c| -c).collect());
    }
    chain
}

fn variations(chain: &[Poly], x: &Q) -> usize {
    let signs: Vec<i32> = chain
        .iter()
        .map(|p| eval(p, x))
        .filter(|v| !v.is_zero())
        .map(|v| if v.is_positive() { 1 } else { -1 })
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

fn isolate(chain: &[Poly], lo: Q, hi: Q, width: &Q, out: &mut Vec<Q>) {
    // roots in (lo, hi]
    let count = variations(chain, &lo) - variations(chain, &hi);
    if count == 0 {
        return;
    }
    if count == 1 && &(&hi - &lo) < width {
        out.push((lo + hi) / Q::from_integer(BigInt::from(2)));
        return;
    }
    let mid = (&lo + &hi) / Q::from_integer(BigInt::from(2));
    isolate(chain, lo, mid.clone(), width, out);
    isolate(chain, mid, hi, width, out);
}

/// Distinct real roots (ascending) with multiplicities, to within `1e-13`.
pub fn eigenvalues(g: &Graph) -> Vec<(f64, usize)> {
    let p: Poly = char_poly(g).into_iter().map(Q::from_integer).collect();
    let square_free = divrem(&p, &gcd(&p, &deriv(&p))).0;
    let chain = sturm(&square_free);
    let bound = Q::from_integer(BigInt::from(g.n() as i64 + 1));
    let width = Q::new(BigInt::one(), BigInt::from(10u64).pow(13));
    let mut roots = Vec::new();
    isolate(&chain, -bound.clone(), bound, &width, &mut roots);
    roots.into_iter().map(|r| (r.to_f64().unwrap(), multiplicity(&p, &r))).collect()
}

/// Times the root near `approx` survives `q ← gcd(q, q')`.
fn multiplicity(p: &Poly, approx: &Q) -> usize {
    let eps = Q::new(BigInt::one(), BigInt::from(10u64).pow(9));
    let (lo, hi) = (approx - &eps, approx + &eps);
    let mut k = 0;
    let mut q = p.clone();
    while q.len() > 1 {
        let chain = sturm(&divrem(&q, &gcd(&q, &deriv(&q))).0);
        if variations(&chain, &lo) == variations(&chain, &hi) {
            break;
        }
        k += 1;
        q = gcd(&q, &deriv(&q));
    }
    k
}

/// `max(|λ_2|, |λ_n|)` for a regular graph, from the exact spectrum.
pub fn exact_lambda(g: &Graph) -> f64 {
    let spectrum = eigenvalues(g);
    let (top, top_mult) = *spectrum.last().unwrap();
    let second = if top_mult > 1 { top } else { spectrum[spectrum.len() - 2].0 };
    second.abs().max(spectrum[0].0.abs())
}

/// Erdős–Rényi style graph from a seed, for oracle comparisons.
pub fn random_graph(seed: RngSeed, n_max: usize) -> Graph {
    let mut rng = seed.rng();
    let n = rng.random_range(1..=n_max);
    let p: f64 = rng.random_range(0.0..1.0);
    let mut edges = Vec::new();
    for u in 0..n as Vertex {
        for v in u + 1..n as Vertex {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edge_list(n, edges).unwrap()
}

/// Chi-square goodness of fit of `draws` against the uniform distribution on
/// all `d`-regular graphs on `n` vertices, with graphs grouped into at most
/// `buckets` cells by enumeration rank. Returns `(statistic, dof, p_value)`.
pub fn uniformity_p_value(n: usize, d: usize, draws: &[Graph], buckets: usize) -> (f64, usize, f64) {
    let all = list_graphs_with_degrees(&DegreeSequence::regular(n, d)).unwrap();
    let cells = buckets.min(all.len());
    let index: HashMap<&Graph, usize> = all.iter().enumerate().map(|(i, g)| (g, i % cells)).collect();
    let mut observed = vec![0f64; cells];
    for g in draws {
        observed[index[g]] += 1.0;
    }
    let mut expected = vec![0f64; cells];
    for i in 0..all.len() {
        expected[i % cells] += draws.len() as f64 / all.len() as f64;
    }
    let stat: f64 = observed.iter().zip(&expected).map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = cells - 1;
    let p = 1.0 - ChiSquared::new(dof as f64).unwrap().cdf(stat);
    (stat, dof, p)
}
