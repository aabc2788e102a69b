use ici_core::net::{with_base_flows, Branch, Bus, BusId, CoherentGroups, GroupSpec, NetworkCase};
use ici_core::pipeline::pick_slack;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct Instance {
    pub case: NetworkCase,
    pub groups: CoherentGroups,
}

/// Buses as `(load, gen)` pairs, branches as `(from, to, b)` with 0-based
/// ends; base flows are filled in.
pub fn case_from(buses: &[(f64, f64)], edges: &[(usize, usize, f64)]) -> NetworkCase {
    let buses =
        buses.iter().enumerate().map(|(i, &(load_pu, gen_pu))| Bus { id: i as BusId + 1, load_pu, gen_pu }).collect();
    let branches = edges.iter().map(|&(u, v, b)| Branch::new(u, v, b)).collect();
    let raw = NetworkCase::new(100.0, buses, branches).unwrap();
    with_base_flows(&raw, pick_slack(&raw)).unwrap()
}

/// Groups from 1-based bus id lists; the first id of each list is the root.
pub fn groups_of(case: &NetworkCase, sets: &[&[u32]]) -> CoherentGroups {
    let specs: Vec<GroupSpec> = sets.iter().map(|s| GroupSpec { buses: s.to_vec(), root: Some(s[0]) }).collect();
    CoherentGroups::new(case, &specs).unwrap()
}

/// Two generator/load triangles joined by a weak tie (bus ids 1..=6).
pub fn six_bus() -> Instance {
    let case = case_from(
        &[(0.0, 1.0), (0.5, 0.0), (0.4, 0.0), (0.0, 0.8), (0.5, 0.0), (0.4, 0.0)],
        &[(0, 1, 8.0), (1, 2, 8.0), (0, 2, 8.0), (2, 3, 2.0), (3, 4, 8.0), (4, 5, 8.0), (3, 5, 8.0)],
    );
    let groups = groups_of(&case, &[&[1, 2], &[4, 5], &[6]]);
    Instance { case, groups }
}

/// 2×5 ladder, generation on the left end, load on the right.
pub fn ten_bus() -> Instance {
    let buses = [
        (0.0, 1.2),
        (0.3, 0.0),
        (0.2, 0.0),
        (0.4, 0.0),
        (0.3, 0.0),
        (0.2, 0.6),
        (0.3, 0.0),
        (0.0, 0.4),
        (0.3, 0.0),
        (0.4, 0.0),
    ];
    let mut edges = Vec::new();
    for i in 0..4 {
        edges.push((i, i + 1, 6.0));
        edges.push((i + 5, i + 6, 6.0));
    }
    for i in 0..5 {
        edges.push((i, i + 5, 4.0));
    }
    let case = case_from(&buses, &edges);
    let groups = groups_of(&case, &[&[1, 6], &[5, 10]]);
    Instance { case, groups }
}

/// Random connected instance with `n` buses, at most `2n` branches, `b` in
/// `[2, 8]` and `k` groups of one or two buses.
pub fn random_instance(seed: u64, n: usize, k: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    let max_m = (2 * n).min(n * (n - 1) / 2);
    let target = rng.gen_range(n..=max_m);
    let mut tries = 0;
    while edges.len() < target && tries < 1000 {
        tries += 1;
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let (u, v) = (u.min(v), u.max(v));
        if u != v && !edges.contains(&(u, v)) {
            edges.push((u, v));
        }
    }
    let branches: Vec<(usize, usize, f64)> =
        edges.iter().map(|&(u, v)| (u, v, (rng.gen_range(2.0..8.0_f64) * 100.0).round() / 100.0)).collect();
    let buses: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let load = if rng.gen_bool(0.6) { (rng.gen_range(0.1..1.0_f64) * 100.0).round() / 100.0 } else { 0.0 };
            let gen = if rng.gen_bool(0.4) { (rng.gen_range(0.2..1.5_f64) * 100.0).round() / 100.0 } else { 0.0 };
            (load, gen)
        })
        .collect();
    let case = case_from(&buses, &branches);

    let mut order: Vec<u32> = (1..=n as u32).collect();
    order.shuffle(&mut rng);
    let mut sets: Vec<Vec<u32>> = order[..k].iter().map(|&r| vec![r]).collect();
    let mut spare = order[k..].iter();
    for set in sets.iter_mut() {
        if rng.gen_bool(0.4) {
            if let Some(&b) = spare.next() {
                set.push(b);
            }
        }
    }
    let refs: Vec<&[u32]> = sets.iter().map(Vec::as_slice).collect();
    let groups = groups_of(&case, &refs);
    Instance { case, groups }
}

/// Path A-B-C-D with `b` = 1, 10, 1; generators at A and C, loads at B and
/// D, roots A and D. Opening B-C isolates two balanced halves but needs an
/// angle jump of 12 per unit of flow across the strong middle branch.
pub fn weak_chain() -> Instance {
    let case = case_from(&[(0.0, 0.6), (0.6, 0.0), (0.0, 0.6), (0.6, 0.0)], &[(0, 1, 1.0), (1, 2, 10.0), (2, 3, 1.0)]);
    let groups = groups_of(&case, &[&[1], &[4]]);
    Instance { case, groups }
}

/// Root A (bus 1) carries load, root B (bus 2) nothing; a generator sits on
/// a four-cycle pocket reachable from A only through B.
pub fn pocket() -> Instance {
    let case = case_from(
        &[(1.0, 0.0), (0.0, 0.0), (0.0, 1.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)],
        &[(0, 1, 5.0), (1, 2, 5.0), (2, 3, 5.0), (3, 4, 5.0), (4, 5, 5.0), (5, 2, 5.0)],
    );
    let groups = groups_of(&case, &[&[1], &[2]]);
    Instance { case, groups }
}
