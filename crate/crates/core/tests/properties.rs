use std::sync::{Arc, OnceLock};

use condensate_linear::asymptotics::u_infinity;
use condensate_linear::collision::{assemble_linearized, quadratic_form, LinearOperator, ReductionConstants};
use condensate_linear::field::{radial_moment, HarmonicField, Sector};
use condensate_linear::gamma::gamma_paper;
use condensate_linear::grid::{build_grid, equilibrium_weights, EquilibriumWeights, RadialGrid};
use condensate_linear::profile::{parse_profile, BinOp, Func, ProfileExpr};
use condensate_linear::spectral::{spectral_decompose, trajectory, EigenSystem, Eigensolver, MassShift};
use condensate_linear::timechange::{build_map, check_admissibility, reconstruct, SamplePolicy};
use condensate_linear::Error;
use proptest::prelude::*;

struct Fixture {
    grid: RadialGrid,
    weights: EquilibriumWeights,
    op: LinearOperator,
    eig: EigenSystem,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let grid = build_grid(12.0, 60).unwrap();
        let weights = equilibrium_weights(&grid);
        let op = assemble_linearized(&grid, &weights, &ReductionConstants::default());
        let eig = spectral_decompose(&op, &grid, 1e-12, Eigensolver::Householder).unwrap();
        Fixture { grid, weights, op, eig }
    })
}

fn vector() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 60)
}

fn expr() -> impl Strategy<Value = ProfileExpr> {
    let leaf = prop_oneof![
        (0.0f64..100.0).prop_map(ProfileExpr::Num),
        Just(ProfileExpr::K),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        let op = prop_oneof![
            Just(BinOp::Add),
            Just(BinOp::Sub),
            Just(BinOp::Mul),
            Just(BinOp::Div),
            Just(BinOp::Pow)
        ];
        prop_oneof![
            inner.clone().prop_map(|a| ProfileExpr::Neg(Box::new(a))),
            (op, inner.clone(), inner.clone()).prop_map(|(o, a, b)| ProfileExpr::Bin(o, Box::new(a), Box::new(b))),
            inner.clone().prop_map(|a| ProfileExpr::Call(Func::Exp, vec![a])),
            inner.clone().prop_map(|a| ProfileExpr::Call(Func::Sinh, vec![a])),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ProfileExpr::Call(Func::Power, vec![a, b])),
            (inner.clone(), inner.clone(), inner).prop_map(|(a, b, c)| ProfileExpr::Call(Func::GaussBump, vec![a, b, c])),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn print_then_parse_is_identity(e in expr()) {
        let text = e.to_string();
        prop_assert_eq!(parse_profile(&text).unwrap(), e);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn gamma_error_estimate_bounds_refinement(x in 0.01f64..40.0) {
        let coarse = gamma_paper(x, 1e-8).unwrap();
        let fine = gamma_paper(x, 1e-12).unwrap();
        prop_assert!((coarse.value - fine.value).abs() <= coarse.error.max(1e-14 * fine.value));
        prop_assert!(fine.value > 0.0);
        prop_assert!(gamma_paper(1.01 * x, 1e-10).unwrap().value > gamma_paper(x, 1e-10).unwrap().value);
    }

    #[test]
    fn gamma_is_linear_at_small_x(x in 1e-6f64..0.05) {
        let g = gamma_paper(x, 1e-10).unwrap().value;
        let slope = std::f64::consts::PI.powi(4) / 15.0;
        prop_assert!((g - slope * x).abs() <= 0.05 * x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn operator_is_symmetric_and_dissipative(f in vector(), g in vector()) {
        let fx = fixture();
        let op = &fx.op;
        let scale = op.pairing(&f, &f).abs().sqrt() * op.pairing(&g, &g).abs().sqrt();
        prop_assert!((op.pairing(&f, &g) - op.pairing(&g, &f)).abs() <= 1e-12 * scale);
        prop_assert!(op.pairing(&f, &f) <= 1e-14 * op.norm());
        prop_assert!(op.energy_column_residual(fx.grid.nodes(), &f) <= 1e-12);
    }

    #[test]
    fn mass_exchange_is_the_form_against_one(f in vector()) {
        let fx = fixture();
        let ones = vec![1.0; fx.grid.len()];
        let x = fx.op.mass_exchange(&f);
        let q = quadratic_form(&f, &ones, &fx.grid, &fx.op.consts);
        prop_assert!((x - q).abs() <= 1e-9 * x.abs().max(q.abs()).max(1e-300));
    }

    #[test]
    fn propagation_is_a_semigroup(f in vector(), t1 in 0.0f64..2.0, t2 in 0.0f64..2.0) {
        let eig = &fixture().eig;
        let direct = eig.propagate(&f, t1 + t2).unwrap();
        let split = eig.propagate(&eig.propagate(&f, t1).unwrap(), t2).unwrap();
        let norm = direct.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
        for (a, b) in direct.iter().zip(&split) {
            prop_assert!((a - b).abs() <= 1e-10 * norm);
        }
    }

    #[test]
    fn energy_is_conserved_and_distance_shrinks(f in vector()) {
        let fx = fixture();
        let taus = SamplePolicy { tau_min: 1e-4, tau_max: 1e2, per_decade: 4 }.samples();
        let field = HarmonicField::radial(f);
        let traj = trajectory(&fx.eig, &fx.grid, &fx.weights, &field, &taus, &[]).unwrap();
        let s = traj.sector(Sector::RADIAL).unwrap();
        let e0 = s.m1[0];
        let scale = field.get(Sector::RADIAL).unwrap().iter().zip(&fx.weights.eta).map(|(f, e)| (f * e).abs()).sum::<f64>();
        for m1 in &s.m1 {
            prop_assert!((m1 - e0).abs() <= 1e-10 * e0.abs().max(scale));
        }
        for w in s.dist_to_limit.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-14);
        }
    }

    #[test]
    fn projection_keeps_energy_per_sector(f in vector(), g in vector()) {
        let fx = fixture();
        let u0 = HarmonicField::radial(f).with_sector(Sector::new(2, -1).unwrap(), g).unwrap();
        let state = u_infinity(&u0, &fx.grid, &fx.weights);
        for (sector, v) in u0.sectors() {
            let e0 = radial_moment(v, 1, &fx.grid, &fx.weights);
            let e1 = radial_moment(state.profile.get(sector).unwrap(), 1, &fx.grid, &fx.weights);
            let scale = v.iter().zip(&fx.weights.eta).map(|(f, e)| (f * e).abs()).sum::<f64>();
            prop_assert!((e0 - e1).abs() <= 1e-9 * scale);
        }
    }
}

/// `g(τ) = a (1 − e^{−bτ}) + c sin(τ) e^{−τ}`.
struct Synthetic {
    a: f64,
    b: f64,
    c: f64,
}

impl MassShift for Synthetic {
    fn g(&self, t: f64) -> f64 {
        -self.a * (-self.b * t).exp_m1() + self.c * t.sin() * (-t).exp()
    }
    fn dg(&self, t: f64) -> f64 {
        self.a * self.b * (-self.b * t).exp() + self.c * (t.cos() - t.sin()) * (-t).exp()
    }
    fn limit(&self) -> Option<f64> {
        Some(self.a)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn build_map_refuses_exactly_the_inadmissible(
        a in -2.0f64..4.0, b in 0.1f64..10.0, c in -3.0f64..3.0, m_c0 in 0.5f64..4.0,
    ) {
        let taus = SamplePolicy { tau_min: 1e-6, tau_max: 1e3, per_decade: 12 }.samples();
        let shift = Arc::new(Synthetic { a, b, c });
        let verdict = check_admissibility(m_c0, shift.as_ref(), &taus, shift.limit()).unwrap();
        prop_assume!(!verdict.caveat);
        match build_map(m_c0, shift.clone(), &taus) {
            Ok(map) => {
                prop_assert!(verdict.admissible);
                prop_assert!(map.q_c.iter().all(|q| *q > 0.0));
                prop_assert!(map.q_inf.unwrap() > 0.0);
                prop_assert!(map.t.windows(2).all(|w| w[1] > w[0]));
                for &tau in taus.iter().step_by(5) {
                    let back = map.invert(map.t_of(tau).unwrap()).unwrap().tau;
                    prop_assert!((back - tau).abs() <= 1e-9 * (1.0 + tau));
                }
            }
            Err(Error::Inadmissible { tau_star, .. }) => {
                prop_assert!(!verdict.admissible);
                prop_assert!(tau_star.is_finite() && tau_star > 0.0);
                prop_assert!(m_c0 * m_c0 - 2.0 * shift.g(tau_star) <= 1e-9 * m_c0 * m_c0);
            }
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn mass_ledger_is_exact(f in vector(), m_c0 in 20.0f64..40.0) {
        let fx = fixture();
        let taus = SamplePolicy { tau_min: 1e-6, tau_max: 1e3, per_decade: 10 }.samples();
        let u0 = HarmonicField::radial(f.clone());
        let shift = Arc::new(fx.eig.mass_shift(&f));
        let map = build_map(m_c0, shift, &taus).unwrap();
        let times = [0.0, 0.1, 1.0, 10.0, 100.0, 1e3];
        let rec = reconstruct(&fx.eig, &map, &fx.grid, &fx.weights, &u0, &times).unwrap();
        let total0 = rec.m_c[0].powi(2) + 2.0 * rec.mass_moment[0];
        for j in 0..times.len() {
            let total = rec.m_c[j].powi(2) + 2.0 * rec.mass_moment[j];
            prop_assert!((total - total0).abs() <= 1e-12 * m_c0 * m_c0);
        }
    }
}
