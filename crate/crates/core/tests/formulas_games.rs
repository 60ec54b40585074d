use std::collections::BTreeSet;

use mallgames::formula::{
    check_position, formulas_up_to, literals, parse_formula, valid_positions, Formula, Position,
};
use mallgames::game::{game_of_formula, game_of_sequent, invert, product, AsyncGame, Polarity, VarEnv, Vertex};
use mallgames::homotopy::{check_game_axioms, is_simply_connected};
use proptest::prelude::*;

fn env() -> VarEnv {
    VarEnv::atomic(["X", "Y"])
}

fn formula(depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::var("X")),
        Just(Formula::covar("X")),
        Just(Formula::var("Y")),
        Just(Formula::covar("Y")),
    ];
    leaf.prop_recursive(depth, 32, 2, |inner| {
        (0..4u8, inner.clone(), inner).prop_map(|(k, a, b)| match k {
            0 => Formula::par(a, b),
            1 => Formula::tensor(a, b),
            2 => Formula::with(a, b),
            _ => Formula::plus(a, b),
        })
    })
}

fn leaves(v: &Vertex, out: &mut Vec<Vertex>) {
    match v {
        Vertex::Tuple(vs) => vs.iter().for_each(|w| leaves(w, out)),
        other => out.push(other.clone()),
    }
}

type Edge = (Vec<Vertex>, Vec<Vertex>, Polarity);
type Square = ((Vec<Vertex>, Vec<Vertex>, Vec<Vertex>), (Vec<Vertex>, Vec<Vertex>, Vec<Vertex>));

/// The game with tuple nesting forgotten and components reordered by `perm`.
fn canonical(g: &AsyncGame, perm: &[usize]) -> (BTreeSet<Edge>, BTreeSet<Square>) {
    let name = |v: usize| {
        let mut flat = Vec::new();
        leaves(g.vertex(v), &mut flat);
        perm.iter().map(|&i| flat[i].clone()).collect::<Vec<_>>()
    };
    let edges = g
        .transitions()
        .iter()
        .map(|t| (name(t.src), name(t.dst), t.polarity))
        .collect();
    let side = |(m, p): (usize, usize)| {
        let (m, p) = (g.transition(m), g.transition(p));
        (name(m.src), name(m.dst), name(p.dst))
    };
    let tiles = g
        .tiles()
        .iter()
        .map(|t| {
            let (a, b) = (side(t.first), side(t.second));
            if a <= b {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect();
    (edges, tiles)
}

#[test]
fn positions_agree_with_membership_up_to_depth_three() {
    let env = env();
    let fs = formulas_up_to(3, &literals(&["X", "Y"]));
    // candidate positions: those of every formula of depth at most two
    let mut pool = BTreeSet::new();
    for f in formulas_up_to(2, &literals(&["X", "Y"])) {
        pool.extend(valid_positions(&f, &env).unwrap());
    }
    for f in &fs {
        let valid = valid_positions(f, &env).unwrap();
        for p in &valid {
            assert!(check_position(p, f, &env), "{} rejects {}", f, p.pretty());
        }
        for p in pool.difference(&valid) {
            assert!(!check_position(p, f, &env), "{} accepts {}", f, p.pretty());
        }
    }
}

#[test]
fn formula_games_up_to_depth_two_satisfy_the_axioms() {
    let env = env();
    for f in formulas_up_to(2, &literals(&["X", "Y"])) {
        let g = game_of_formula(&f, &env).unwrap();
        assert!(check_game_axioms(&g).is_empty(), "{f}");
        assert!(is_simply_connected(&g), "{f}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dual_is_an_involution(f in formula(4)) {
        prop_assert_eq!(f.dual().dual(), f);
    }

    #[test]
    fn display_parses_back(f in formula(4)) {
        prop_assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn positions_of_the_dual_are_dual_positions(f in formula(3)) {
        let env = env();
        let direct = valid_positions(&f.dual(), &env).unwrap();
        let dualised: BTreeSet<Position> = valid_positions(&f, &env).unwrap().iter().map(Position::dual).collect();
        prop_assert_eq!(direct, dualised);
    }

    #[test]
    fn check_position_matches_membership(f in formula(4), g in formula(3)) {
        let env = env();
        let valid = valid_positions(&f, &env).unwrap();
        for p in valid.iter().chain(valid_positions(&g, &env).unwrap().iter()) {
            prop_assert_eq!(check_position(p, &f, &env), valid.contains(p), "{} in {}", p.pretty(), &f);
        }
    }

    #[test]
    fn built_games_satisfy_the_axioms(a in formula(3), b in formula(2)) {
        let env = env();
        let ga = game_of_formula(&a, &env).unwrap();
        let gb = game_of_formula(&b, &env).unwrap();
        let candidates = [
            game_of_sequent(&[a.clone(), b.clone()], &env).unwrap(),
            product(&ga, &gb),
            invert(&ga),
        ];
        for g in &candidates {
            let v = check_game_axioms(g);
            prop_assert!(v.is_empty(), "{:?}", v);
            prop_assert!(is_simply_connected(g));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn product_is_commutative_and_associative(a in formula(2), b in formula(1), c in formula(1)) {
        let env = env();
        let (ga, gb, gc) = (
            game_of_formula(&a, &env).unwrap(),
            game_of_formula(&b, &env).unwrap(),
            game_of_formula(&c, &env).unwrap(),
        );
        prop_assert_eq!(canonical(&product(&ga, &gb), &[0, 1]), canonical(&product(&gb, &ga), &[1, 0]));
        prop_assert_eq!(
            canonical(&product(&product(&ga, &gb), &gc), &[0, 1, 2]),
            canonical(&product(&ga, &product(&gb, &gc)), &[0, 1, 2])
        );
    }
}
