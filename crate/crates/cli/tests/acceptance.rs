//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use termgraph::codegraph::{Port, PortSide};
use termgraph::laws::random::{default_labels, default_types, random_code_graph, random_jungle_with, random_let_seq};
use termgraph::laws::{check_axioms, isomorphic, naturality_counterexample, unfold, AxiomBounds, IsoChecker, IsoWitness, Term};
use termgraph::world::extend_weak;
use termgraph::{CEnv, CodeGraph, Fresh, HyperEdge, Hypergraph, Label, LetSeq, NestedLet, NodeRef, World};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn l(name: &str, arity: usize) -> Label {
    Label::new(name, arity)
}

fn iso(a: &Hypergraph, b: &Hypergraph) -> bool {
    isomorphic(a, b).expect("iso bound").is_some()
}

fn manifest() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn program(name: &str) -> PathBuf {
    manifest().join("programs").join(name)
}

fn elaborate_file(name: &str) -> Hypergraph {
    let text = std::fs::read_to_string(program(name)).unwrap();
    let parsed = tgcli::syntax::parse_program(&text).unwrap();
    tgcli::elaborate::elaborate(&parsed, &[]).unwrap().jungle
}

// 1

fn tg0_lib() -> LetSeq {
    let shared = LetSeq::seq(&LetSeq::prim(l("F", 1)), &LetSeq::dup(1)).unwrap();
    LetSeq::seq(&LetSeq::par(&shared, &LetSeq::prim(l("G", 2))).unwrap(), &LetSeq::prim(l("H", 3))).unwrap()
}

/// `let x0 = H(let x0 = F(i0) in x0 ▽ x0, let x0 = G(i1, i2) in x0) in x0`
fn tg0_nested() -> NestedLet {
    let o = World::empty();
    let x0 = extend_weak(&o, "x0");
    let inner = x0.to().clone();
    let var = || NestedLet::var(inner.clone(), 3, x0.name()).unwrap();
    let input = |i| NestedLet::input(o.clone(), 3, i).unwrap();
    let shared = NestedLet::bind(x0.clone(), l("F", 1), input(0), NestedLet::fork(var(), var()).unwrap()).unwrap();
    let g = NestedLet::bind(x0.clone(), l("G", 2), NestedLet::fork(input(1), input(2)).unwrap(), var()).unwrap();
    NestedLet::bind(x0.clone(), l("H", 3), NestedLet::fork(shared, g).unwrap(), var()).unwrap()
}

fn tg0_shape(name: &str, g: &Hypergraph, expected: &[Term]) -> Result<(), String> {
    let shape = (g.edges().len(), g.inner_count(), g.input_arity(), g.output_arity());
    ensure!(shape == (3, 3, 3, 1), "{name}: shape {shape:?}");
    ensure!(g.is_jungle() && g.is_acyclic(), "{name}: not an acyclic jungle");
    let u = unfold(g).map_err(|e| format!("{name}: {e}"))?;
    ensure!(u == expected, "{name}: unfolds to {u:?}");
    Ok(())
}

fn tg0_agreement() -> Check {
    let v = Term::Var;
    let f = Term::app(l("F", 1), vec![v(0)]);
    let expected = [Term::app(l("H", 3), vec![f.clone(), f, Term::app(l("G", 2), vec![v(1), v(2)])])];

    let reference = tg0_lib().to_jungle().unwrap();
    tg0_shape("tg0", &reference, &expected)?;

    let weak = tg0_nested();
    ensure!(!weak.is_strong(), "nested TG0 should use weak links");
    let env = CEnv::new(World::empty());
    let strong = NestedLet::strengthen(&Fresh::empty(), &env, &weak).map_err(|e| e.to_string())?;
    ensure!(strong.is_strong(), "strengthened TG0 still has weak links");
    let flat = NestedLet::flatten(&Fresh::empty(), &env, &strong).map_err(|e| e.to_string())?;
    ensure!(flat.is_strong() && flat.let_count() == 3, "flattened: {flat}");
    let nested = flat.to_jungle().map_err(|e| e.to_string())?;
    tg0_shape("TG0", &nested, &expected)?;
    ensure!(iso(&nested, &reference), "TG0 and tg0 are not isomorphic");

    for file in ["tg0_weak.tg", "tg0.tg"] {
        let g = elaborate_file(file);
        tg0_shape(file, &g, &expected)?;
        ensure!(iso(&g, &reference), "{file} is not isomorphic to tg0");
    }
    Ok(format!("nested TG0, tg0_weak.tg, tg0.tg ≅ tg0; 3 edges, 3 inner, 3 -> 1; {flat}"))
}

// 2

fn axiom_suite() -> Check {
    let bounds = AxiomBounds::with_max_inner(4);
    let mut cases = 0;
    for seed in 0..3 {
        let report = check_axioms(seed, 1000, &bounds);
        ensure!(report.equations.len() == 15, "seed {seed}: {} equations", report.equations.len());
        for eq in &report.equations {
            ensure!(eq.cases == 1000, "seed {seed}: {} ran {} cases", eq.name, eq.cases);
            if let Some(f) = eq.failures.first() {
                return Err(format!("seed {seed}: {} fails at case {}", eq.name, f.case));
            }
            cases += eq.cases;
        }
    }
    Ok(format!("{cases} cases over seeds 0..=2, 0 failures"))
}

// 3

fn naturality_failure() -> Check {
    let f = Hypergraph::prim(l("F", 1));
    let term_lhs = f.seq(&Hypergraph::term(1)).unwrap();
    let term_rhs = Hypergraph::term(1);
    ensure!(!iso(&term_lhs, &term_rhs), "F ; ! ≅ !");

    let dup_lhs = f.seq(&Hypergraph::dup(1)).unwrap();
    let dup_rhs = Hypergraph::dup(1).seq(&f.par(&f)).unwrap();
    ensure!(!iso(&dup_lhs, &dup_rhs), "F ; ∇ ≅ ∇ ; (F ⊗ F)");
    let (ul, ur) = (unfold(&dup_lhs).unwrap(), unfold(&dup_rhs).unwrap());
    ensure!(ul == ur, "unfoldings differ: {ul:?} vs {ur:?}");
    ensure!(ul.len() == 2, "expected two outputs");

    let reported = naturality_counterexample(&l("F", 1)).map_err(|e| e.to_string())?;
    ensure!(reported == (true, true), "library reports {reported:?}");
    Ok(format!("both squares fail; shared unfolding {}", ul.len()))
}

// 4

fn subst(t: &Term, args: &[Term]) -> Term {
    match t {
        Term::Var(i) => args[*i].clone(),
        Term::App(f, ts) => Term::App(f.clone(), ts.iter().map(|u| subst(u, args)).collect()),
    }
}

fn shift(t: &Term, by: usize) -> Term {
    match t {
        Term::Var(i) => Term::Var(i + by),
        Term::App(f, ts) => Term::App(f.clone(), ts.iter().map(|u| shift(u, by)).collect()),
    }
}

fn oracle_coherence() -> Check {
    let labels = default_labels();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut seqs, mut pars, mut edges) = (0, 0, 0);
    for _ in 0..300 {
        let (k, m, n) = (rng.random_range(0..=3), rng.random_range(0..=3), rng.random_range(0..=3));
        let a = random_jungle_with(&mut rng, k, m, 4, &labels);
        let b = random_jungle_with(&mut rng, m, n, 4, &labels);
        let (ua, ub) = (unfold(&a).unwrap(), unfold(&b).unwrap());
        let expected: Vec<Term> = ub.iter().map(|t| subst(t, &ua)).collect();
        let composed = a.seq(&b).unwrap();
        ensure!(unfold(&composed).unwrap() == expected, "seq mismatch at pair {seqs}");
        seqs += 1;
        edges += composed.edges().len();

        let (p, q) = (rng.random_range(0..=3), rng.random_range(0..=3));
        let c = random_jungle_with(&mut rng, p, q, 4, &labels);
        let mut expected = ua;
        expected.extend(unfold(&c).unwrap().iter().map(|t| shift(t, a.input_arity())));
        ensure!(unfold(&a.par(&c)).unwrap() == expected, "par mismatch at pair {pars}");
        pars += 1;
    }
    Ok(format!("{seqs} seq pairs ({edges} edges), {pars} par pairs"))
}

// 5

fn jungle(g: &LetSeq) -> Hypergraph {
    g.to_jungle().unwrap()
}

fn functoriality() -> Check {
    let labels = default_labels();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut pairs = 0;
    let checker = IsoChecker::new(32);
    let iso = |a: &Hypergraph, b: &Hypergraph| checker.check(a, b).expect("iso bound").is_some();
    for _ in 0..300 {
        let (k, m, n) = (rng.random_range(0..=3), rng.random_range(0..=3), rng.random_range(0..=3));
        let a = random_let_seq(&mut rng, k, m, 5, &labels);
        let b = random_let_seq(&mut rng, m, n, 5, &labels);
        let c = random_let_seq(&mut rng, k, n, 5, &labels);
        let (ja, jb, jc) = (jungle(&a), jungle(&b), jungle(&c));

        let s = LetSeq::seq(&a, &b).map_err(|e| e.to_string())?;
        ensure!(iso(&jungle(&s), &ja.seq(&jb).unwrap()), "seq: {a} then {b}");
        let p = LetSeq::par(&a, &b).map_err(|e| e.to_string())?;
        ensure!(iso(&jungle(&p), &ja.par(&jb)), "par: {a} beside {b}");
        let f = LetSeq::fork(&a, &c).map_err(|e| e.to_string())?;
        let expected = Hypergraph::dup(k).seq(&ja.par(&jc)).unwrap();
        ensure!(iso(&jungle(&f), &expected), "fork: {a} with {c}");

        let d = random_let_seq(&mut rng, k, m, 3, &labels);
        let left = LetSeq::fork(&LetSeq::fork(&a, &c).unwrap(), &d).unwrap();
        let right = LetSeq::fork(&a, &LetSeq::fork(&c, &d).unwrap()).unwrap();
        ensure!(iso(&jungle(&left), &jungle(&right)), "fork is not associative");
        let unit = LetSeq::term(k);
        ensure!(iso(&jungle(&LetSeq::fork(&unit, &a).unwrap()), &ja), "left unit");
        ensure!(iso(&jungle(&LetSeq::fork(&a, &unit).unwrap()), &ja), "right unit");
        pairs += 1;
    }
    Ok(format!("{pairs} pairs: seq, par, fork, fork assoc, fork unit"))
}

// 6

fn port_type(g: &CodeGraph, port: Port) -> termgraph::TypeId {
    match port {
        Port::Edge { edge, side, port } => {
            let ty = g.e_label(edge).unwrap().edge_type();
            match side {
                PortSide::Input => ty.in_types[port].clone(),
                PortSide::Output => ty.out_types[port].clone(),
            }
        }
        Port::GraphOutput { position } => g.out_types()[position].clone(),
    }
}

fn typed_soundness() -> Check {
    let types = default_types();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut graphs, mut perturbed) = (0, 0);
    while graphs < 500 || perturbed < 500 {
        let width = rng.random_range(0..=3);
        let ins: Vec<_> = (0..width).map(|_| types.choose(&mut rng).unwrap().clone()).collect();
        let g = random_code_graph(&mut rng, &ins, 3, &types);
        if graphs < 500 {
            let v = g.typecheck();
            ensure!(v.is_empty(), "composite {graphs} has {} violations", v.len());
            graphs += 1;
        }
        if perturbed < 500 {
            let Some(&port) = g.ports().choose(&mut rng) else { continue };
            let old = port_type(&g, port);
            let new = types.iter().find(|t| **t != old).unwrap().clone();
            let bad = g.with_port_type(port, new).map_err(|e| e.to_string())?;
            ensure!(!bad.typecheck().is_empty(), "perturbation at {port:?} went unnoticed");
            perturbed += 1;
        }
    }
    Ok(format!("{graphs} composites typecheck, {perturbed} perturbations rejected"))
}

// 7

fn bijective(p: &[usize], n: usize) -> bool {
    let mut sorted = p.to_vec();
    sorted.sort_unstable();
    sorted.into_iter().eq(0..n)
}

/// Structural check of a candidate pair of bijections.
fn witness_holds(a: &Hypergraph, b: &Hypergraph, inner: &[usize], edges: &[usize]) -> bool {
    let map = |n: &NodeRef| match n {
        NodeRef::Input(i) => NodeRef::Input(*i),
        NodeRef::Inner(j) => NodeRef::Inner(inner[*j]),
    };
    a.input_arity() == b.input_arity()
        && a.output_arity() == b.output_arity()
        && a.edges().iter().zip(edges).all(|(e, &t)| {
            let img = &b.edges()[t];
            img.label == e.label
                && img.out == inner[e.out]
                && img.inputs.len() == e.inputs.len()
                && e.inputs.iter().zip(&img.inputs).all(|(x, y)| map(x) == *y)
        })
        && a.output().iter().zip(b.output()).all(|(x, y)| map(x) == *y)
}

fn valid_witness(a: &Hypergraph, b: &Hypergraph, w: &IsoWitness) -> bool {
    a.inner_count() == b.inner_count()
        && a.edges().len() == b.edges().len()
        && bijective(&w.inner, a.inner_count())
        && bijective(&w.edges, a.edges().len())
        && witness_holds(a, b, &w.inner, &w.edges)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for at in 0..=p.len() {
            let mut q = p.clone();
            q.insert(at, n - 1);
            out.push(q);
        }
    }
    out
}

fn naive_iso(a: &Hypergraph, b: &Hypergraph, perms: &[Vec<usize>]) -> bool {
    a.inner_count() == b.inner_count()
        && a.edges().len() == b.edges().len()
        && perms.iter().any(|inner| perms.iter().any(|edges| witness_holds(a, b, inner, edges)))
}

/// Every 1 -> 1 graph whose edge `j` produces inner node `j`, over unary
/// `F` and `G`, with any choice of edge input and output node.
fn exhaustive(k: usize) -> Vec<Hypergraph> {
    let labels = [l("F", 1), l("G", 1)];
    let nodes: Vec<NodeRef> = std::iter::once(NodeRef::Input(0)).chain((0..k).map(NodeRef::Inner)).collect();
    let choices = labels.len() * nodes.len();
    let mut out = Vec::new();
    for code in 0..choices.pow(k as u32) {
        let mut c = code;
        let edges: Vec<HyperEdge> = (0..k)
            .map(|j| {
                let pick = c % choices;
                c /= choices;
                HyperEdge::new(labels[pick / nodes.len()].clone(), vec![nodes[pick % nodes.len()]], j)
            })
            .collect();
        for &o in &nodes {
            out.push(Hypergraph::new(1, 1, k, edges.clone(), vec![o]).unwrap());
        }
    }
    out
}

fn reversed(g: &Hypergraph) -> Hypergraph {
    let edges = g.edges().iter().rev().cloned().collect();
    Hypergraph::new(g.input_arity(), g.output_arity(), g.inner_count(), edges, g.output().to_vec()).unwrap()
}

fn iso_consistency() -> Check {
    let (mut pairs, mut positive) = (0u64, 0u64);
    for k in 0..=3 {
        let perms = permutations(k);
        let set = exhaustive(k);
        let flipped: Vec<_> = set.iter().map(reversed).collect();
        for a in &set {
            for b in &flipped {
                let fast = isomorphic(a, b).map_err(|e| e.to_string())?;
                if let Some(w) = &fast {
                    ensure!(valid_witness(a, b, w), "bad witness {w:?}");
                    positive += 1;
                }
                ensure!(fast.is_some() == naive_iso(a, b, &perms), "disagreement on {a:?} vs {b:?}");
                pairs += 1;
            }
        }
    }
    ensure!(positive > 0, "no isomorphic pairs in the exhaustive set");

    let labels = default_labels();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut witnesses = 0;
    for _ in 0..500 {
        let (m, n) = (rng.random_range(0..=2), rng.random_range(0..=2));
        let a = random_jungle_with(&mut rng, m, n, 4, &labels);
        let b = random_jungle_with(&mut rng, m, n, 4, &labels);
        for (x, y) in [(&a, &a), (&a, &b), (&b, &a)] {
            if let Some(w) = isomorphic(x, y).map_err(|e| e.to_string())? {
                ensure!(valid_witness(x, y, &w), "bad witness on random pair");
                witnesses += 1;
            }
        }
    }
    Ok(format!("{pairs} exhaustive pairs agree ({positive} isomorphic); {witnesses} random witnesses re-verify"))
}

// 8

fn tg(args: &[&str]) -> (Vec<u8>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_tg")).args(args).env_remove("TG_COLOR").output().unwrap();
    (out.stdout, out.status.code().unwrap_or(-1))
}

fn golden(name: &str) -> Vec<u8> {
    std::fs::read(manifest().join("tests/golden").join(name)).unwrap()
}

fn cli_golden() -> Check {
    let files: Vec<String> = ["tg0.tg", "tg0_weak.tg", "unshared.tg", "arity_error.tg", "divmod.tg", "divmod_bad.tg", "identity.tg"]
        .iter()
        .map(|f| program(f).to_str().unwrap().to_owned())
        .collect();
    let [tg0, weak, unshared, arity, divmod, divmod_bad, identity] = &files[..] else { unreachable!() };
    let tmp = std::env::temp_dir().join(format!("tg-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&tmp).unwrap();
    let bad_syntax = tmp.join("bad.tg");
    std::fs::write(&bad_syntax, "label F : 1\ninputs 1\nlet = F(i0)\noutputs i0\n").unwrap();
    let lib_tg0 = tmp.join("tg0_lib.tg");
    std::fs::write(&lib_tg0, tgcli::syntax::print_jungle(&jungle(&tg0_lib())).unwrap()).unwrap();
    let bad = bad_syntax.to_str().unwrap();
    let lib = lib_tg0.to_str().unwrap();

    let (dot, code) = tg(&["dot", tg0]);
    ensure!(code == 0, "dot exit {code}");
    ensure!(dot == golden("tg0.dot"), "DOT output differs from golden file");
    ensure!(tg(&["dot", tg0]).0 == dot, "DOT output is not deterministic");
    let (table, code) = tg(&["axioms", "--seed", "0", "--count", "1000", "--max-inner", "4"]);
    ensure!(code == 0, "axioms exit {code}");
    ensure!(table == golden("axioms_seed0.txt"), "axioms table differs from golden file");

    let expect = [
        (vec!["check", tg0], 0),
        (vec!["iso", tg0, weak], 0),
        (vec!["iso", weak, lib], 0),
        (vec!["iso", tg0, unshared], 1),
        (vec!["check", arity], 1),
        (vec!["typecheck", divmod], 0),
        (vec!["typecheck", divmod_bad], 1),
        (vec!["check", bad], 2),
        (vec!["check", "/nonexistent/file.tg"], 2),
        (vec!["compose", tg0, identity], 2),
        (Vec::<&str>::new(), 2),
    ];
    for (args, want) in &expect {
        let (_, code) = tg(args);
        ensure!(code == *want, "tg {} exited {code}, expected {want}", args.join(" "));
    }
    let _ = std::fs::remove_dir_all(&tmp);
    Ok(format!("2 golden files match; {} exit codes as expected", expect.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("TG0/tg0 agreement", tg0_agreement),
        ("axiom suite", axiom_suite),
        ("naturality failure", naturality_failure),
        ("oracle coherence", oracle_coherence),
        ("conversion functoriality", functoriality),
        ("typed soundness", typed_soundness),
        ("iso oracle self-consistency", iso_consistency),
        ("CLI golden files", cli_golden),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS [{}] {name}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
