mod common;

use common::arb_symbol;
use dirac_moyal::bracket::{jacobi_defect, BracketKind};
use dirac_moyal::constraint::is_symplectic;
use dirac_moyal::sample;
use dirac_moyal::symbol::Monomial;
use dirac_moyal::{
    class_equal, darboux_basis, dirac, moyal, moyal_dirac_defect, push_to_reduced, random_symplectic,
    reduced_star_consistency, star, DiracStructure, HamiltonianSystem, PhaseSpace, Scalar, Symbol,
};
use proptest::prelude::*;

fn systems() -> Vec<DiracStructure> {
    let mut out: Vec<DiracStructure> = sample::reference_systems().into();
    let mut rng = sample::rng(3);
    out.push(sample::system(&mut rng, 2, 1));
    out.push(sample::system(&mut rng, 3, 1));
    out
}

fn structure() -> impl Strategy<Value = DiracStructure> {
    prop::sample::select(systems())
}

fn with_symbols(
    n: usize,
    deg: u32,
    hbar: u32,
    complex: bool,
) -> impl Strategy<Value = (DiracStructure, Symbol, Symbol, Symbol)> {
    structure().prop_flat_map(move |ds| {
        let dim = ds.space().dim();
        let s = || arb_symbol(dim, deg, n, hbar, complex);
        (Just(ds), s(), s(), s())
    })
}

fn conj(a: &Symbol) -> Symbol {
    Symbol::from_terms(a.dim(), a.terms().map(|(m, k, c)| (m.clone(), k, c.conj())))
}

fn ideal_element(ds: &DiracStructure, x: &Symbol) -> Symbol {
    ds.constraint_symbols()
        .iter()
        .enumerate()
        .fold(Symbol::zero(x.dim()), |acc, (mu, phi)| acc + phi * &x.partial(mu).unwrap() + phi * x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn associativity((ds, a, b, c) in with_symbols(3, 3, 1, true)) {
        let left = star(&star(&a, &b, &ds).unwrap(), &c, &ds).unwrap();
        let right = star(&a, &star(&b, &c, &ds).unwrap(), &ds).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn classical_limit_is_pointwise((ds, a, b, _c) in with_symbols(4, 3, 0, true)) {
        prop_assert_eq!(star(&a, &b, &ds).unwrap().hbar_coefficient(0), &a * &b);
    }

    #[test]
    fn star_is_hermitian((ds, a, b, _c) in with_symbols(4, 3, 0, false)) {
        let ab = star(&a, &b, &ds).unwrap();
        prop_assert_eq!(conj(&ab), star(&b, &a, &ds).unwrap());
        prop_assert!(moyal(&a, &b, &ds).unwrap().is_real());
    }

    #[test]
    fn star_respects_classes((ds, a, b, x) in with_symbols(3, 2, 1, true)) {
        let shifted = &a + &ideal_element(&ds, &x);
        prop_assert!(class_equal(&shifted, &a, &ds).unwrap());
        let ab = star(&a, &b, &ds).unwrap();
        prop_assert!(class_equal(&star(&shifted, &b, &ds).unwrap(), &ab, &ds).unwrap());
        let ba = star(&b, &a, &ds).unwrap();
        prop_assert!(class_equal(&star(&b, &shifted, &ds).unwrap(), &ba, &ds).unwrap());
    }

    #[test]
    fn constraint_ideal_is_two_sided((ds, x, _b, _c) in with_symbols(4, 3, 1, true)) {
        let zero = Symbol::zero(x.dim());
        for phi in ds.constraint_symbols() {
            prop_assert!(class_equal(&star(&phi, &x, &ds).unwrap(), &zero, &ds).unwrap());
            prop_assert!(class_equal(&star(&x, &phi, &ds).unwrap(), &zero, &ds).unwrap());
        }
    }

    #[test]
    fn moyal_dirac_defect_starts_at_hbar_squared((ds, a, b, _c) in with_symbols(4, 3, 0, true)) {
        let d = moyal_dirac_defect(&a, &b, &ds).unwrap();
        prop_assert!(d.hbar_coefficient(0).is_zero());
        prop_assert!(d.hbar_coefficient(1).is_zero());
        prop_assert!(d.div_hbar_power(2).is_some());
    }

    #[test]
    fn jacobi_identities((ds, a, b, c) in with_symbols(3, 3, 1, true)) {
        prop_assert!(jacobi_defect(BracketKind::Moyal, &a, &b, &c, &ds).unwrap().is_zero());
        prop_assert!(jacobi_defect(BracketKind::Dirac, &a, &b, &c, &ds).unwrap().is_zero());
    }

    #[test]
    fn reduction_detects_classes((ds, a, b, x) in with_symbols(3, 3, 1, true)) {
        let chart = darboux_basis(&ds);
        let shifted = &a + &ideal_element(&ds, &x);
        prop_assert_eq!(push_to_reduced(&a, &chart).unwrap(), push_to_reduced(&shifted, &chart).unwrap());
        let same = push_to_reduced(&a, &chart).unwrap() == push_to_reduced(&b, &chart).unwrap();
        prop_assert_eq!(same, class_equal(&a, &b, &ds).unwrap());
    }

    #[test]
    fn reduced_star_matches_standard((ds, a, b, _c) in with_symbols(3, 3, 1, true)) {
        let chart = darboux_basis(&ds);
        prop_assert!(reduced_star_consistency(&a, &b, &chart, &ds).unwrap().is_zero());
        // Moyal consistency follows from the star one.
        let lhs = push_to_reduced(&moyal(&a, &b, &ds).unwrap(), &chart).unwrap();
        let pa = push_to_reduced(&a, &chart).unwrap();
        let pb = push_to_reduced(&b, &chart).unwrap();
        prop_assert_eq!(lhs, dirac_moyal::star::moyal_standard(&pa, &pb).unwrap());
    }

    #[test]
    fn coordinate_moyal_equals_dirac((ds, h, _b, _c) in with_symbols(4, 3, 0, false), i in 0usize..6) {
        let dim = h.dim();
        let z = Symbol::coordinate(dim, i % dim);
        prop_assert_eq!(moyal(&z, &h, &ds).unwrap(), dirac(&z, &h, &ds).unwrap());
    }

    #[test]
    fn dirac_flow_is_tangent_and_matches_multipliers((ds, h, _b, _c) in with_symbols(4, 3, 0, false)) {
        let system = HamiltonianSystem::new(ds.clone(), h).unwrap();
        let field = system.dirac_vector_field();
        prop_assert_eq!(&field, &system.total_hamiltonian_field());
        let alpha = ds.alpha();
        for mu in 0..alpha.rows() {
            let dot = field.iter().enumerate().fold(Symbol::zero(field.len()), |acc, (j, f)| {
                acc + f.scale(&Scalar::real(alpha[(mu, j)].clone()))
            });
            prop_assert!(dot.is_zero());
        }
    }

    #[test]
    fn symplectic_changes_preserve_structure(seed in any::<u64>()) {
        let [_, s2] = sample::reference_systems();
        let s = random_symplectic(s2.space(), seed);
        prop_assert!(is_symplectic(&s));
        let moved = s2.apply_symplectic_transform(&s).unwrap();
        prop_assert_eq!(moved.alpha().rank(), 2);
        prop_assert_eq!(moved.jd_rank(), s2.jd_rank());
        prop_assert!(moved.c().determinant() != num_traits::Zero::zero());
    }
}

#[test]
fn reality_on_monomial_pair() {
    let space = PhaseSpace::new(1);
    let a = Symbol::from_terms(2, [(Monomial::from_exponents(vec![2, 1]), 0, Scalar::from_int(1))]);
    let b = space.coordinate(1);
    let j = dirac_moyal::QMatrix::symplectic(1);
    let ab = dirac_moyal::star::star_with_kernel(&a, &b, &j).unwrap();
    let ba = dirac_moyal::star::star_with_kernel(&b, &a, &j).unwrap();
    assert_eq!(conj(&ab), ba);
}
