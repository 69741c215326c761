//! Fuzzed check of the symmetric monoidal and gs-monoidal equations on
//! jungles, with equality taken as isomorphism.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use super::iso::{IsoChecker, DEFAULT_MAX_INNER};
use super::random::{default_labels, random_jungle_with};
use crate::jungle::Hypergraph;
use crate::label::Label;

#[derive(Clone, Debug)]
pub struct AxiomBounds {
    /// Inner nodes per generated operand.
    pub max_inner: usize,
    /// Largest object (wire count) drawn for `A`, `B`, `C`, `D`.
    pub max_object: usize,
    pub labels: Vec<Label>,
}

impl Default for AxiomBounds {
    fn default() -> Self {
        AxiomBounds { max_inner: 4, max_object: 3, labels: default_labels() }
    }
}

impl AxiomBounds {
    pub fn with_max_inner(max_inner: usize) -> Self {
        AxiomBounds { max_inner, ..Self::default() }
    }
}

#[derive(Clone, Debug)]
pub struct Failure {
    pub seed: u64,
    pub case: usize,
    pub lhs: Hypergraph,
    pub rhs: Hypergraph,
}

#[derive(Clone, Debug)]
pub struct EquationReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<Failure>,
}

#[derive(Clone, Debug)]
pub struct AxiomReport {
    pub seed: u64,
    /// Sorted by equation name.
    pub equations: Vec<EquationReport>,
}

impl AxiomReport {
    pub fn failure_count(&self) -> usize {
        self.equations.iter().map(|e| e.failures.len()).sum()
    }

    pub fn is_ok(&self) -> bool {
        self.failure_count() == 0
    }

    /// One line per equation; identical for identical seeds and counts.
    pub fn table(&self) -> String {
        let mut out = format!("{:<24}{:>8}{:>10}\n", "equation", "cases", "failures");
        for eq in &self.equations {
            out += &format!("{:<24}{:>8}{:>10}\n", eq.name, eq.cases, eq.failures.len());
        }
        let cases: usize = self.equations.iter().map(|e| e.cases).sum();
        out += &format!("{:<24}{:>8}{:>10}\n", "total", cases, self.failure_count());
        out
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.table())
    }
}

struct Gen<'a> {
    bounds: &'a AxiomBounds,
    min_object: usize,
}

impl Gen<'_> {
    fn object(&self, rng: &mut ChaCha8Rng) -> usize {
        rng.random_range(self.min_object..=self.bounds.max_object.max(self.min_object))
    }

    fn graph(&self, rng: &mut ChaCha8Rng, inputs: usize, outputs: usize) -> Hypergraph {
        random_jungle_with(rng, inputs, outputs, self.bounds.max_inner, &self.bounds.labels)
    }
}

type Pairs = Vec<(Hypergraph, Hypergraph)>;

fn seq(a: &Hypergraph, b: &Hypergraph) -> Hypergraph {
    a.seq(b).expect("interfaces agree by construction")
}

fn id(k: usize) -> Hypergraph {
    Hypergraph::identity(k)
}

fn x(a: usize, b: usize) -> Hypergraph {
    Hypergraph::exch(a, b)
}

const EQUATIONS: &[(&str, fn(&mut ChaCha8Rng, &Gen) -> Pairs)] = &[
    ("category.assoc", |rng, g| {
        let (a, b, c, d) = (g.object(rng), g.object(rng), g.object(rng), g.object(rng));
        let (f, gg, h) = (g.graph(rng, a, b), g.graph(rng, b, c), g.graph(rng, c, d));
        vec![(seq(&seq(&f, &gg), &h), seq(&f, &seq(&gg, &h)))]
    }),
    ("category.left_id", |rng, g| {
        let (a, b) = (g.object(rng), g.object(rng));
        let f = g.graph(rng, a, b);
        vec![(seq(&id(a), &f), f)]
    }),
    ("category.right_id", |rng, g| {
        let (a, b) = (g.object(rng), g.object(rng));
        let f = g.graph(rng, a, b);
        vec![(seq(&f, &id(b)), f)]
    }),
    ("monoidal.interchange", |rng, g| {
        let (a, b, c) = (g.object(rng), g.object(rng), g.object(rng));
        let (d, e, h) = (g.object(rng), g.object(rng), g.object(rng));
        let (f1, f2) = (g.graph(rng, a, b), g.graph(rng, b, c));
        let (g1, g2) = (g.graph(rng, d, e), g.graph(rng, e, h));
        vec![(seq(&f1.par(&g1), &f2.par(&g2)), seq(&f1, &f2).par(&seq(&g1, &g2)))]
    }),
    ("monoidal.id_tensor", |rng, g| {
        let (a, b) = (g.object(rng), g.object(rng));
        vec![(id(a).par(&id(b)), id(a + b))]
    }),
    ("ssmc.exch_natural", |rng, g| {
        let (a, b, c, d) = (g.object(rng), g.object(rng), g.object(rng), g.object(rng));
        let (f, gg) = (g.graph(rng, a, c), g.graph(rng, b, d));
        vec![(seq(&f.par(&gg), &x(c, d)), seq(&x(a, b), &gg.par(&f)))]
    }),
    ("ssmc.exch_involutive", |rng, g| {
        let (a, b) = (g.object(rng), g.object(rng));
        vec![(seq(&x(a, b), &x(b, a)), id(a).par(&id(b)))]
    }),
    ("ssmc.exch_tensor", |rng, g| {
        let (a, b, c) = (g.object(rng), g.object(rng), g.object(rng));
        vec![(x(a + b, c), seq(&id(a).par(&x(b, c)), &x(a, c).par(&id(b))))]
    }),
    ("ssmc.exch_unit", |_, _| vec![(x(0, 0), id(0))]),
    ("gs.dup_coassoc", |rng, g| {
        let a = g.object(rng);
        let dup = Hypergraph::dup(a);
        vec![(seq(&dup, &id(a).par(&dup)), seq(&dup, &dup.par(&id(a))))]
    }),
    ("gs.dup_commutative", |rng, g| {
        let a = g.object(rng);
        vec![(seq(&Hypergraph::dup(a), &x(a, a)), Hypergraph::dup(a))]
    }),
    ("gs.dup_counit", |rng, g| {
        let a = g.object(rng);
        vec![(seq(&Hypergraph::dup(a), &id(a).par(&Hypergraph::term(a))), id(a))]
    }),
    ("gs.dup_tensor", |rng, g| {
        let (a, b) = (g.object(rng), g.object(rng));
        let lhs = seq(&Hypergraph::dup(a + b), &id(a).par(&x(b, a)).par(&id(b)));
        vec![(lhs, Hypergraph::dup(a).par(&Hypergraph::dup(b)))]
    }),
    ("gs.term_tensor", |rng, g| {
        let (a, b) = (g.object(rng), g.object(rng));
        vec![(Hypergraph::term(a + b), Hypergraph::term(a).par(&Hypergraph::term(b)))]
    }),
    ("gs.unit_coherence", |_, _| {
        vec![(id(0), Hypergraph::term(0)), (Hypergraph::term(0), Hypergraph::dup(0))]
    }),
];

/// Run `count` random instances of every equation. Instance `case` of
/// equation `k` draws from its own stream of the generator seeded by
/// `seed`, so the report does not depend on scheduling.
pub fn check_axioms(seed: u64, count: usize, bounds: &AxiomBounds) -> AxiomReport {
    let nullary = bounds.max_inner > 0 && bounds.labels.iter().any(|l| l.arity() == 0);
    let gen = Gen { bounds, min_object: if nullary { 0 } else { 1.min(bounds.max_object) } };
    // composites glue up to four operands together
    let checker = IsoChecker::new(DEFAULT_MAX_INNER.max(4 * bounds.max_inner));
    let mut equations: Vec<EquationReport> = EQUATIONS
        .par_iter()
        .enumerate()
        .map(|(k, &(name, build))| {
            let failures = (0..count)
                .into_par_iter()
                .flat_map_iter(|case| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(((k as u64) << 32) | case as u64);
                    build(&mut rng, &gen)
                        .into_iter()
                        .filter(|(lhs, rhs)| !matches!(checker.check(lhs, rhs), Ok(Some(_))))
                        .map(move |(lhs, rhs)| Failure { seed, case, lhs, rhs })
                        .collect::<Vec<_>>()
                })
                .collect();
            EquationReport { name, cases: count, failures }
        })
        .collect();
    equations.sort_by_key(|e| e.name);
    AxiomReport { seed, equations }
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum LawError {
    #[error("label {0} is not unary")]
    NotUnary(Label),
}

/// For unary `f`, whether `f ; !` differs from `!` and whether `f ; ∇`
/// differs from `∇ ; (f ⊗ f)`. Both hold: terminators and duplicators are
/// not natural on term graphs.
pub fn naturality_counterexample(f: &Label) -> Result<(bool, bool), LawError> {
    if f.arity() != 1 {
        return Err(LawError::NotUnary(f.clone()));
    }
    let (lhs_term, rhs_term) = naturality_pairs(f)[0].clone();
    let (lhs_dup, rhs_dup) = naturality_pairs(f)[1].clone();
    let differ = |a: &Hypergraph, b: &Hypergraph| {
        IsoChecker::default().check(a, b).expect("tiny graphs").is_none()
    };
    Ok((differ(&lhs_term, &rhs_term), differ(&lhs_dup, &rhs_dup)))
}

/// `(f ; !1, !1)` and `(f ; ∇1, ∇1 ; (f ⊗ f))`.
pub fn naturality_pairs(f: &Label) -> [(Hypergraph, Hypergraph); 2] {
    let prim = Hypergraph::prim(f.clone());
    [
        (seq(&prim, &Hypergraph::term(1)), Hypergraph::term(1)),
        (seq(&prim, &Hypergraph::dup(1)), seq(&Hypergraph::dup(1), &prim.par(&prim))),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws::term::{unfold, Term};

    #[test]
    fn zero_cases() {
        let r = check_axioms(0, 0, &AxiomBounds::default());
        assert_eq!(r.equations.len(), 15);
        assert!(r.equations.iter().all(|e| e.cases == 0 && e.failures.is_empty()));
    }

    #[test]
    fn small_run_passes_and_is_deterministic() {
        let bounds = AxiomBounds::default();
        let a = check_axioms(3, 40, &bounds);
        assert!(a.is_ok(), "{}", a.table());
        assert_eq!(a.table(), check_axioms(3, 40, &bounds).table());
        let names: Vec<&str> = a.equations.iter().map(|e| e.name).collect();
        let mut sorted = names.clone();
        sorted.sort_unstable();
        assert_eq!(names, sorted);
    }

    #[test]
    fn operands_are_not_trivial() {
        let bounds = AxiomBounds::default();
        let gen = Gen { bounds: &bounds, min_object: 0 };
        let (name, build) = EQUATIONS[0];
        assert_eq!(name, "category.assoc");
        let mut edges = 0;
        let mut inner = 0;
        for case in 0..200 {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            rng.set_stream(case);
            let (lhs, _) = &build(&mut rng, &gen)[0];
            edges += lhs.edges().len();
            inner = inner.max(lhs.inner_count());
        }
        assert!(edges > 600, "{edges}");
        assert!(inner > 8, "{inner}");
    }

    #[test]
    fn counit_example() {
        let lhs = seq(&Hypergraph::dup(2), &id(2).par(&Hypergraph::term(2)));
        assert!(IsoChecker::default().check(&lhs, &id(2)).unwrap().is_some());
    }

    #[test]
    fn wrong_equation_is_caught() {
        // dup is not natural, so pretending it is must be reported
        let f = Label::new("F", 1);
        let [_, (lhs, rhs)] = naturality_pairs(&f);
        assert!(IsoChecker::default().check(&lhs, &rhs).unwrap().is_none());
    }

    #[test]
    fn naturality_fails() {
        let f = Label::new("F", 1);
        assert_eq!(naturality_counterexample(&f), Ok((true, true)));
        let [_, (lhs, rhs)] = naturality_pairs(&f);
        assert_eq!((lhs.edges().len(), rhs.edges().len()), (1, 2));
        let fx = Term::app(f.clone(), vec![Term::Var(0)]);
        assert_eq!(unfold(&lhs).unwrap(), vec![fx.clone(), fx]);
        assert_eq!(unfold(&lhs), unfold(&rhs));
        assert!(naturality_counterexample(&Label::new("H", 2)).is_err());
    }
}
