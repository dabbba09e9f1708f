//! One line per criterion; the test fails if any criterion fails.

mod common;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::time::{Duration, Instant};

use gbs_core::autver::{bounded_inner_search, verify_presentation, AutomorphismSpec, BsGroup, GroupWord, PinchOrder};
use gbs_core::bspq::{self, BspqParams, ReducedType, XBall};
use gbs_core::explorer::{infinite_dim_witness, star_in_K, star_in_W};
use gbs_core::graph::single_loop;
use gbs_core::invariants::{euler, euler_by_valence, InvariantSummary};
use gbs_core::moves;
use gbs_core::retract::{in_W, shelters, surviving_edges, surviving_edges_oracle, ShelterType};
use gbs_core::{canonical, canonical_form, LabeledGraph};
use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const SEED: u64 = 0x5eed;
const STAR_LIMIT: Duration = Duration::from_secs(1);
const REDUCED_LIMIT: Duration = Duration::from_secs(30);
const INFDIM_LIMIT: Duration = Duration::from_secs(5);
const PRESENTATION_LIMIT: Duration = Duration::from_secs(10);
const OUTER_LIMIT: Duration = Duration::from_secs(60);
const CORPUS_MIN: usize = 500;
const RANDOM_MOVES: usize = 1000;
const RANDOM_WORDS: usize = 10_000;

type Verdict = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:?}, limit {limit:?}"))?;
    Ok(t)
}

fn star_reproduction() -> Verdict {
    let start = Instant::now();
    let g = single_loop(2, 4);
    let star = star_in_K(&g, 2, 4);
    let mults = |layer: usize| {
        let mut m: Vec<u64> = star.layer(layer).iter().map(|v| v.multiplicity).collect();
        m.sort_unstable_by(|a, b| b.cmp(a));
        m
    };
    ensure(star.vertices.len() == 6 && star.marked_vertex_count() == 8, || {
        format!("{} classes, {} marked", star.vertices.len(), star.marked_vertex_count())
    })?;
    ensure(mults(0) == [1] && mults(1) == [2, 1, 1] && mults(2) == [2, 1], || {
        format!("multiplicities {:?} {:?} {:?}", mults(0), mults(1), mults(2))
    })?;
    ensure(star.relations.len() == 7 && star.maximal_chain_count() == 6, || {
        format!("{} relations, {} maximal chains", star.relations.len(), star.maximal_chain_count())
    })?;
    let root = canonical(&g);
    for r in &star.relations {
        let (u, l) = (&star.vertices[r.upper], &star.vertices[r.lower]);
        ensure(u.layer > l.layer && r.marked >= 1, || format!("bad relation {r:?}"))?;
    }

    let w = star_in_W(&g, 2, 4);
    let c = &w.complex;
    ensure(c.vertices.len() == 2 && c.marked_vertex_count() == 3, || {
        format!("W-star has {} classes, {} marked", c.vertices.len(), c.marked_vertex_count())
    })?;
    ensure(c.vertices.iter().any(|v| v.certificate == root && v.multiplicity == 1), || {
        "root missing from W-star".into()
    })?;
    ensure(
        c.relations.len() == 1 && c.relations[0].marked == 2 && c.vertices[c.relations[0].lower].certificate == root,
        || format!("W-star relations {:?}", c.relations),
    )?;
    let excluded_marked: u64 =
        w.excluded.iter().map(|(cert, _)| star.vertices[star.index_of(cert).unwrap()].multiplicity).sum();
    ensure(excluded_marked == 5, || format!("{excluded_marked} excluded marked vertices"))?;
    ensure(w.excluded.iter().all(|(_, img)| *img == root), || {
        "an excluded vertex does not retract to the root".into()
    })?;
    let t = within(start, STAR_LIMIT)?;
    Ok(format!("8 marked vertices, W-star path of 2 edges centred at the root, 5 excluded; {t:?}"))
}

fn reduced_exhaustion() -> Verdict {
    let start = Instant::now();
    let mut summary = Vec::new();
    for &(p, q) in &common::FAMILIES {
        let params = BspqParams::new(p, q).map_err(|e| e.to_string())?;
        let (c0, g0) = canonical_form(&single_loop(p, q));
        let mut seen = BTreeSet::from([c0]);
        let mut frontier = vec![g0.clone()];
        let mut all = vec![g0];
        for _ in 0..6 {
            let mut next = Vec::new();
            for g in &frontier {
                for (_, h) in moves::reduced_neighbors(g).map_err(|e| e.to_string())? {
                    if seen.insert(canonical(&h)) {
                        next.push(h.clone());
                        all.push(h);
                    }
                }
            }
            frontier = next;
        }
        let mut type2 = 0;
        for g in &all {
            match bspq::classify_reduced(g, &params) {
                Ok(ReducedType::Type1) => {}
                Ok(ReducedType::Type2 { .. }) => type2 += 1,
                Err(e) => return Err(format!("({p},{q}): {e}")),
            }
        }
        summary.push(format!("({p},{q}) {} graphs/{type2} type2", all.len()));
    }
    let t = within(start, REDUCED_LIMIT)?;
    Ok(format!("{}; {t:?}", summary.join(", ")))
}

fn acceptance_corpus() -> Result<Vec<LabeledGraph>, String> {
    let mut graphs: BTreeMap<_, _> = common::corpus(&common::seeds(), 4, 4, usize::MAX);
    for k in 1..=10 {
        for g in infinite_dim_witness(k).map_err(|e| e.to_string())? {
            let (c, g) = canonical_form(&g);
            graphs.insert(c, g);
        }
    }
    Ok(graphs.into_values().collect())
}

fn shelter_oracle(corpus: &[LabeledGraph]) -> Verdict {
    ensure(corpus.len() >= CORPUS_MIN, || format!("corpus has only {} graphs", corpus.len()))?;
    for g in corpus {
        let (fast, slow) = (surviving_edges(g), surviving_edges_oracle(g));
        ensure(fast == slow, || format!("{}: shelters give {fast:?}, oracle {slow:?}", canonical(g)))?;
    }
    Ok(format!("{} graphs agree", corpus.len()))
}

fn invariant_preservation(corpus: &[LabeledGraph]) -> Verdict {
    let mut rng = StdRng::seed_from_u64(SEED);
    let (mut applied, mut attempts) = (0, 0);
    while applied < RANDOM_MOVES {
        attempts += 1;
        ensure(attempts < 100 * RANDOM_MOVES, || "too few applicable moves".into())?;
        let g = &corpus[rng.gen_range(0..corpus.len())];
        let Some(mv) = common::random_move(g, 4, &mut rng) else { continue };
        let Ok(h) = mv.apply_raw(g) else { continue };
        applied += 1;
        ensure(euler(&h) == euler_by_valence(&h), || format!("Euler formulas disagree after {mv:?}"))?;
        ensure(InvariantSummary::of(g) == InvariantSummary::of(&h), || {
            format!("{mv:?} on {} changed invariants", canonical(g))
        })?;
    }
    Ok(format!("{applied} moves, invariants unchanged"))
}

fn infinite_dimension() -> Verdict {
    let start = Instant::now();
    for k in 1..=10 {
        let chain = infinite_dim_witness(k).map_err(|e| format!("k = {k}: {e}"))?;
        ensure(chain.len() == k as usize + 1, || format!("k = {k}: chain of {}", chain.len()))?;
        for (l, g) in chain.iter().enumerate() {
            ensure(in_W(g), || format!("T_{k}^{l} not in W"))?;
            let s3: BTreeSet<_> =
                shelters(g).shelters.iter().filter(|s| s.kind == ShelterType::S3).flat_map(|s| s.edges()).collect();
            ensure(s3.len() == g.edge_count(), || format!("T_{k}^{l} not covered by S3 shelters"))?;
        }
        for (l, pair) in chain.windows(2).enumerate() {
            let collapses_down = moves::collapsible_edges(&pair[1])
                .iter()
                .any(|end| moves::collapse(&pair[1], end).is_ok_and(|h| canonical(&h) == canonical(&pair[0])));
            ensure(collapses_down, || format!("T_{k}^{} does not collapse to T_{k}^{l}", l + 1))?;
        }
    }
    let t = within(start, INFDIM_LIMIT)?;
    Ok(format!("k = 1..10; {t:?}"))
}

/// Node counts per (depth, level) from the degree rules alone, tracking
/// whether each node was entered from below or from above.
fn expected_profile(p: u64, n: u64, radius: usize) -> BTreeMap<(usize, u32), usize> {
    let mut profile = BTreeMap::from([((0, 0), 1)]);
    // (level, entered from below) -> count
    let mut layer: BTreeMap<(u32, bool), usize> = BTreeMap::from([((0, true), 1)]);
    let mut root = true;
    for depth in 1..=radius {
        let mut next: BTreeMap<(u32, bool), usize> = BTreeMap::new();
        for (&(level, from_below), &count) in &layer {
            let (down, up) = match (level, from_below) {
                (0, _) if root => (0, p),
                (0, _) => (0, p - 1),
                (_, true) => (n - 1, 1),
                (_, false) => (n, 0),
            };
            if down > 0 {
                *next.entry((level - 1, false)).or_default() += count * down as usize;
            }
            if up > 0 {
                *next.entry((level + 1, true)).or_default() += count * up as usize;
            }
        }
        root = false;
        for (&(level, _), &count) in &next {
            *profile.entry((depth, level)).or_default() += count;
        }
        layer = next;
    }
    profile
}

fn check_ball(ball: &XBall, p: usize, n: usize) -> Result<(), String> {
    let edges: Vec<(usize, usize)> = ball.edges().collect();
    ensure(edges.len() + 1 == ball.nodes.len(), || "ball is not a tree".into())?;
    let mut reached = vec![false; ball.nodes.len()];
    let mut queue = VecDeque::from([ball.root()]);
    reached[ball.root()] = true;
    while let Some(i) = queue.pop_front() {
        for &(a, b) in &edges {
            let other = if a == i {
                b
            } else if b == i {
                a
            } else {
                continue;
            };
            if !reached[other] {
                reached[other] = true;
                queue.push_back(other);
            }
        }
    }
    ensure(reached.iter().all(|&r| r), || "ball is disconnected".into())?;
    for (i, node) in ball.nodes.iter().enumerate() {
        if node.depth == ball.radius {
            continue;
        }
        let (mut down, mut up) = (0, 0);
        for &(a, b) in &edges {
            let other = if a == i {
                b
            } else if b == i {
                a
            } else {
                continue;
            };
            if ball.nodes[other].level < node.level {
                down += 1;
            } else {
                up += 1;
            }
        }
        let expected = if node.level == 0 { (0, p) } else { (n, 1) };
        ensure((down, up) == expected, || format!("node {i} at level {} has {down} down, {up} up", node.level))?;
    }
    Ok(())
}

fn x_tree() -> Verdict {
    let mut summary = Vec::new();
    for (p, q) in [(2i64, 4i64), (2, 6)] {
        let params = BspqParams::new(p, q).map_err(|e| e.to_string())?;
        let n = (q / p).unsigned_abs();
        let ball = bspq::x_ball(&params, 0, 8, None);
        check_ball(&ball, p as usize, n as usize).map_err(|e| format!("({p},{q}): {e}"))?;
        ensure(ball.profile() == expected_profile(p as u64, n, 8), || {
            format!("({p},{q}): profile differs from the degree recurrence")
        })?;
        let report = bspq::quotient_ray_check(&ball, &params);
        ensure(report.ok, || format!("({p},{q}): {report:?}"))?;
        summary.push(format!("({p},{q}) {} nodes", ball.nodes.len()));
    }
    Ok(summary.join(", "))
}

fn nonfg() -> Verdict {
    for (p, q) in [(2i64, 4i64), (2, 6)] {
        let params = BspqParams::new(p, q).map_err(|e| e.to_string())?;
        for k in 1..=8 {
            let w = bspq::nonfg_witness(&params, k).map_err(|e| format!("({p},{q}) k = {k}: {e}"))?;
            let distinct: BTreeSet<_> = w.path.iter().collect();
            ensure(distinct.len() == w.path.len(), || format!("({p},{q}) k = {k}: path repeats a node"))?;
            ensure(w.levels.first() == Some(&0) && w.levels.last() == Some(&0), || {
                format!("({p},{q}) k = {k}: endpoints not at level 0")
            })?;
            ensure(w.max_level == k + 1 && w.levels.iter().max() == Some(&(k + 1)), || {
                format!("({p},{q}) k = {k}: max level {}", w.max_level)
            })?;
            ensure(w.levels.windows(2).all(|s| s[0].abs_diff(s[1]) == 1), || {
                format!("({p},{q}) k = {k}: path jumps levels")
            })?;
        }
    }
    Ok("k = 1..8 for (2,4) and (2,6)".into())
}

fn presentations() -> Verdict {
    let start = Instant::now();
    let mut bits = Vec::new();
    for (p, q) in [(2i64, 4i64), (2, 6), (3, 6), (2, -4)] {
        let report = verify_presentation(&BsGroup::new(p, q), 5);
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
        ensure(failed.is_empty(), || format!("({p},{q}) failed {failed:?}"))?;
        for name in ["iota psi iota = psi^-1", "psi^(p(n-1)) = c_x^-p"] {
            ensure(report.checks.iter().any(|c| c.name == name), || format!("({p},{q}) missing {name}"))?;
        }
        bits.push(report.max_exponent_bits);
    }
    let t = within(start, PRESENTATION_LIMIT)?;
    Ok(format!("4 families, k_max 5, max exponent bits {bits:?}; {t:?}"))
}

fn outerness() -> Verdict {
    let start = Instant::now();
    let bound = BigInt::from(1_000_000);
    let mut searched = 0;
    for (p, q) in [(2i64, 4i64), (2, 6)] {
        let g = BsGroup::new(p, q);
        let n = q / p;
        let families =
            [(AutomorphismSpec::phi(1, &g), (n * (n - 1)).abs()), (AutomorphismSpec::psi(), p * (n - 1).abs())];
        for (a, order) in &families {
            for l in 1..=*order {
                let power = a.power(&BigInt::from(l), &g);
                let found = bounded_inner_search(&power, &g, 4, &bound);
                searched += 1;
                if l < *order {
                    ensure(found.is_none(), || format!("({p},{q}) {}^{l} is inner", a.name))?;
                } else {
                    ensure(found.is_some(), || format!("({p},{q}) {}^{l} should be inner", a.name))?;
                }
            }
        }
    }
    let t = within(start, OUTER_LIMIT)?;
    Ok(format!("{searched} powers searched, inner exactly at the expected orders; {t:?}"))
}

fn random_word<R: Rng>(rng: &mut R) -> GroupWord {
    let mut w = GroupWord::identity();
    for _ in 0..rng.gen_range(0..16) {
        w = w.concat(&GroupWord::x_pow(rng.gen_range(-12i64..=12)));
        w = w.concat(&GroupWord::t_pow(if rng.gen() { 1 } else { -1 }));
    }
    w.concat(&GroupWord::x_pow(rng.gen_range(-12i64..=12)))
}

fn britton() -> Verdict {
    let mut rng = StdRng::seed_from_u64(SEED);
    let groups = [(2i64, 4i64), (2, 6), (3, 6), (2, -4), (4, 8)].map(|(p, q)| BsGroup::new(p, q));
    for i in 0..RANDOM_WORDS {
        let g = &groups[i % groups.len()];
        let w = random_word(&mut rng);
        ensure(g.is_identity(&w.concat(&w.inverse())), || format!("w w^-1 != 1 for {w}"))?;
        let r = g.reduce(&w);
        for order in [PinchOrder::Leftmost, PinchOrder::Rightmost] {
            let other = g.reduce_naive(&w, order);
            ensure(other.ts() == r.ts() && g.words_equal(&other, &r), || format!("reducers disagree on {w}"))?;
        }
    }
    let report = verify_presentation(&BsGroup::new(3, 6), 5);
    ensure(report.all_passed, || "(3,6) presentation failed".into())?;
    ensure(report.max_exponent_bits > 64, || format!("only {} exponent bits", report.max_exponent_bits))?;
    Ok(format!("{RANDOM_WORDS} words, strategies agree, (3,6) reached {} exponent bits", report.max_exponent_bits))
}

#[test]
fn acceptance() {
    let corpus = acceptance_corpus();
    let criteria: Vec<Criterion> = vec![
        ("star of loop(2,4)", Box::new(star_reproduction)),
        ("reduced graphs classify", Box::new(reduced_exhaustion)),
        ("shelters match the collapse oracle", Box::new(|| shelter_oracle(corpus.as_ref().map_err(Clone::clone)?))),
        ("moves preserve invariants", Box::new(|| invariant_preservation(corpus.as_ref().map_err(Clone::clone)?))),
        ("infinite-dimensional chain", Box::new(infinite_dimension)),
        ("X-tree balls", Box::new(x_tree)),
        ("non-finite-generation witness", Box::new(nonfg)),
        ("automorphism presentations", Box::new(presentations)),
        ("outerness search", Box::new(outerness)),
        ("Britton engine", Box::new(britton)),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    assert_eq!(failures, 0, "{failures} acceptance criteria failed");
}
