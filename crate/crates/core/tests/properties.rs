use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use quandle_quiver::braid::{propagate, propagation_matrix, BraidWord, Letter, TorusLinkSpec};
use quandle_quiver::coloring::{enumerate_colorings_oracle, LinearColoringSystem, DEFAULT_ORACLE_CAP};
use quandle_quiver::isomorphism::{isomorphic, IsoVerdict};
use quandle_quiver::linalg::{kernel_count_mod, smith_normal_form, IntMatrix, DEFAULT_ENUMERATION_CAP};
use quandle_quiver::quandle::{
    affine_endomorphisms, audit_affine_endomorphisms, verify_quandle_axioms, DihedralQuandle, Endomorphism,
    DEFAULT_ENDO_SEARCH_CAP,
};
use quandle_quiver::quiver::{build_quiver, check_quiver_invariants, predict_quiver, realize, WeightedQuiver};

fn small_matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| {
        prop::collection::vec(-3i64..=3, r * c).prop_map(move |v| {
            let rows: Vec<Vec<i64>> = v.chunks(c).map(<[i64]>::to_vec).collect();
            IntMatrix::from_rows(&rows).unwrap()
        })
    })
}

fn word_on(strands: usize) -> impl Strategy<Value = BraidWord> {
    prop::collection::vec((1..strands, any::<bool>()), 0..8).prop_map(move |letters| {
        let letters = letters
            .into_iter()
            .map(|(g, pos)| if pos { Letter::pos(g) } else { Letter::neg(g) })
            .collect();
        BraidWord::new(strands, letters).unwrap()
    })
}

fn braid_word() -> impl Strategy<Value = BraidWord> {
    (2usize..=4).prop_flat_map(word_on)
}

fn quiver_on(n: usize) -> impl Strategy<Value = WeightedQuiver> {
    prop::collection::vec(prop::sample::select(vec![0u64, 0, 1, 2]), n * n)
        .prop_map(move |w| WeightedQuiver::from_dense(&w.chunks(n).map(<[u64]>::to_vec).collect::<Vec<_>>()))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn is_unimodular(m: &IntMatrix) -> bool {
    m.determinant().is_some_and(|d| d.abs().is_one())
}

fn brute_kernel_count(a: &IntMatrix, n: usize) -> u128 {
    let cols = a.cols();
    let mut count = 0;
    let mut v = vec![0usize; cols];
    loop {
        let ok = (0..a.rows()).all(|r| {
            let s: BigInt = (0..cols).map(|c| a.get(r, c) * BigInt::from(v[c])).sum();
            (s % BigInt::from(n)).is_zero()
        });
        count += ok as u128;
        let mut i = 0;
        while i < cols {
            v[i] += 1;
            if v[i] < n {
                break;
            }
            v[i] = 0;
            i += 1;
        }
        if i == cols {
            return count;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn smith_form_is_valid(a in small_matrix()) {
        let snf = smith_normal_form(&a);
        let d = snf.diagonal_matrix();
        prop_assert_eq!(&(&snf.left * &a) * &snf.right, d.clone());
        prop_assert!(is_unimodular(&snf.left));
        prop_assert!(is_unimodular(&snf.right));
        let diag: Vec<&BigInt> = snf.diag.iter().filter(|x| !x.is_zero()).collect();
        prop_assert_eq!(diag.len(), snf.rank);
        for w in diag.windows(2) {
            prop_assert!(w[0].is_positive());
            prop_assert!((w[1] % w[0]).is_zero());
        }
    }

    #[test]
    fn kernel_count_matches_brute_force(a in small_matrix(), n in 2usize..=6) {
        prop_assert_eq!(kernel_count_mod(&a, n as u64).unwrap(), brute_kernel_count(&a, n));
    }

    #[test]
    fn propagation_is_linear(word in braid_word(), n in 2usize..=7, seed in any::<u64>()) {
        let q = DihedralQuandle::new(n).unwrap().to_quandle();
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let top: Vec<usize> = (0..word.strands()).map(|_| rand::Rng::gen_range(&mut rng, 0..n)).collect();
        let bottom = propagate(&word, &q, &top).unwrap().bottom;
        prop_assert_eq!(propagation_matrix(&word).mul_vec_mod(&top, n), bottom);
    }

    #[test]
    fn concatenation_multiplies_matrices((a, b) in (2usize..=4).prop_flat_map(|s| (word_on(s), word_on(s)))) {
        let ab = a.concat(&b).unwrap();
        prop_assert_eq!(propagation_matrix(&ab), &propagation_matrix(&b) * &propagation_matrix(&a));
    }

    #[test]
    fn inverse_word_undoes_propagation(word in braid_word(), n in 2usize..=7) {
        let q = DihedralQuandle::new(n).unwrap().to_quandle();
        let top: Vec<usize> = (0..word.strands()).map(|i| (3 * i + 1) % n).collect();
        let mid = propagate(&word, &q, &top).unwrap().bottom;
        prop_assert_eq!(propagate(&word.inverse(), &q, &mid).unwrap().bottom, top);
    }

    #[test]
    fn backends_agree_on_random_words(word in braid_word(), n in 2usize..=6) {
        let q = DihedralQuandle::new(n).unwrap().to_quandle();
        let oracle = enumerate_colorings_oracle(&word, &q, DEFAULT_ORACLE_CAP).unwrap();
        let linear = LinearColoringSystem::new(&word).colorings(n, DEFAULT_ENUMERATION_CAP).unwrap();
        prop_assert_eq!(oracle.tops(), linear.tops());
    }

    #[test]
    fn isomorphism_matches_exhaustive_search(
        (a, b) in (1usize..=6).prop_flat_map(|n| (quiver_on(n), quiver_on(n))),
        seed in any::<u64>(),
    ) {
        let n = a.vertex_count();
        let exists = permutations(n).iter().any(|p| a.maps_onto(&b, p));
        match isomorphic(&a, &b) {
            IsoVerdict::Isomorphic(perm) => prop_assert!(exists && a.maps_onto(&b, &perm)),
            IsoVerdict::NotIsomorphic => prop_assert!(!exists),
            IsoVerdict::Undecided => prop_assert!(false, "undecided on {} vertices", n),
        }
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rand::rngs::StdRng::seed_from_u64(seed));
        prop_assert!(isomorphic(&a, &a.permuted(&perm)).is_isomorphic());
    }

    #[test]
    fn affine_composition(n in 2usize..=12, a1 in 0usize..12, b1 in 0usize..12, a2 in 0usize..12, b2 in 0usize..12) {
        let f = Endomorphism::affine(n, a1, b1).unwrap();
        let g = Endomorphism::affine(n, a2, b2).unwrap();
        let fg = f.compose(&g);
        for x in 0..n {
            prop_assert_eq!(fg.apply(x), f.apply(g.apply(x)));
        }
        prop_assert_eq!(fg, Endomorphism::affine(n, a1 * a2, a1 * b2 + b1).unwrap());
    }
}

#[test]
fn backend_agreement_on_torus_grid() {
    for p in 2..=5 {
        for q in 0..=2 * p {
            let system = LinearColoringSystem::torus(TorusLinkSpec::new(p, q).unwrap());
            for n in 2..=6 {
                let rn = DihedralQuandle::new(n).unwrap().to_quandle();
                let oracle = enumerate_colorings_oracle(system.word(), &rn, DEFAULT_ORACLE_CAP).unwrap();
                let linear = system.colorings(n, DEFAULT_ENUMERATION_CAP).unwrap();
                assert_eq!(oracle.tops(), linear.tops(), "T({p},{q}) over R_{n}");
            }
        }
    }
}

#[test]
fn dihedral_quandles_are_kei() {
    for n in 1..=50 {
        let q = DihedralQuandle::new(n).unwrap();
        let report = verify_quandle_axioms(&q.cayley_table());
        assert!(report.is_quandle(), "R_{n}: {report}");
        let fq = q.to_quandle();
        assert!(fq.is_kei(), "R_{n} is not a kei");
        for x in 0..n {
            for y in 0..n {
                assert_eq!(fq.op(fq.op(x, y), y), x);
                assert_eq!(fq.inv_op(x, y), fq.op(x, y));
            }
        }
    }
}

#[test]
fn affine_maps_are_endomorphisms() {
    for n in 1..=50 {
        let q = DihedralQuandle::new(n).unwrap().to_quandle();
        let endos = affine_endomorphisms(n);
        assert_eq!(endos.len(), n * n);
        for e in &endos {
            assert_eq!(q.homomorphism_violation(&e.image_table()), None, "R_{n}: {e}");
        }
    }
}

#[test]
fn affine_family_is_complete_for_small_n() {
    for n in 1..=6 {
        let audit = audit_affine_endomorphisms(n, DEFAULT_ENDO_SEARCH_CAP).unwrap();
        assert!(audit.affine_is_complete(), "R_{n}: {audit:?}");
        assert_eq!(audit.brute_force, n * n);
    }
}

#[test]
fn isomorphism_is_permutation_invariant() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for (p, q, n) in [(5, 2, 5), (5, 5, 6), (3, 4, 9), (5, 10, 3), (3, 3, 4)] {
        let set = LinearColoringSystem::torus(TorusLinkSpec::new(p, q).unwrap())
            .colorings(n, DEFAULT_ENUMERATION_CAP)
            .unwrap();
        let quiver = build_quiver(&set, &affine_endomorphisms(n)).unwrap();
        check_quiver_invariants(&quiver, &set, n * n).unwrap();
        let mut perm: Vec<usize> = (0..quiver.vertex_count()).collect();
        perm.shuffle(&mut rng);
        let moved = quiver.permuted(&perm);
        for (a, b) in [(&quiver, &moved), (&moved, &quiver), (&quiver, &quiver)] {
            match isomorphic(a, b) {
                IsoVerdict::Isomorphic(found) => assert!(a.maps_onto(b, &found)),
                other => panic!("T({p},{q}) over R_{n}: {other:?}"),
            }
        }
        if let Ok(form) = predict_quiver(p, q, n) {
            let predicted = realize(&form);
            assert!(isomorphic(&quiver, &predicted).is_isomorphic());
            assert!(isomorphic(&predicted, &quiver).is_isomorphic());
        }
    }
}
