use approx::assert_relative_eq;
use nalgebra::{Isometry3, Rotation3, Vector3};
use proptest::prelude::*;

use sletool::cam;
use sletool::insertion::{self, impedance_step, spiral_waypoints, DampingForm, ImpedanceGains, ImpedanceState, Scenario, SpiralPlan};
use sletool::kinematics::{alpha_to_width, width_to_alpha, AlphaBounds};
use sletool::params::{parse_params, save_params};
use sletool::quasistatics::{torque_squeeze_with, torque_stretch_with, SpringAggregation, SpringSign, TorqueModel};
use sletool::stability::{grasp_wrench_set, pad_contacts, pad_stability, stability_index, StabilityConfig};
use sletool::{GripperParams, ToolParams};

fn stroke() -> AlphaBounds {
    AlphaBounds::from_params(&ToolParams::default()).unwrap()
}

fn in_stroke() -> impl Strategy<Value = f64> {
    let b = stroke();
    b.alpha_min..b.alpha_init
}

fn model() -> impl Strategy<Value = TorqueModel> {
    (any::<bool>(), any::<bool>()).prop_map(|(a, b)| TorqueModel {
        spring_sign: if a { SpringSign::Compressive } else { SpringSign::AsPrinted },
        aggregation: if b { SpringAggregation::Single } else { SpringAggregation::FourSpring },
    })
}

proptest! {
    #[test]
    fn width_and_alpha_are_inverse(alpha in in_stroke(), r_drv in 15.0..30.0f64) {
        let p = ToolParams { r_drv, w_tool_max: 4.0 * r_drv * 0.95 + 13.0, ..ToolParams::default() };
        let w = alpha_to_width(alpha, &p).unwrap();
        prop_assert!((width_to_alpha(w, &p).unwrap() - alpha).abs() < 1e-9);
    }

    #[test]
    fn squeeze_plus_stretch_is_gripper_work(
        alpha in in_stroke(),
        f in 0.0..200.0f64,
        d in 1.0..60.0f64,
        xi in 0.5..50.0f64,
        m in model(),
    ) {
        let p = ToolParams { xi, ..ToolParams::default() };
        let sq = torque_squeeze_with(alpha, f, d, &p, m).unwrap();
        let st = torque_stretch_with(alpha, d, &p, m).unwrap();
        prop_assert!((sq.torque + st - f * d).abs() <= 1e-9 * (f * d).max(1.0));
        prop_assert_eq!(sq.stalled, sq.torque < 0.0);
    }

    #[test]
    fn saved_parameters_load_back_exactly(
        xi in 0.1..60.0f64,
        r_sprt in 5.0..18.0f64,
        mu in 0.05..1.5f64,
        e_soft in 0.5..10.0f64,
        beta in 1.0..89.0f64,
        f in 10.0..300.0f64,
    ) {
        let tool = ToolParams { xi, r_sprt, mu, e_soft, ..ToolParams::default() };
        let gripper = GripperParams { beta, f_grpr_max: f, ..GripperParams::default() };
        let loaded = parse_params(&save_params(&tool, &gripper)).unwrap();
        prop_assert_eq!(loaded.tool, tool);
        prop_assert_eq!(loaded.gripper, gripper);
    }

    #[test]
    fn cam_profile_stays_tangent_to_wheel(alpha in in_stroke(), r_sprt in 4.0..18.0f64) {
        let p = ToolParams { r_sprt, ..ToolParams::default() };
        let c = cam::wheel_center(alpha, &p).unwrap();
        let q = cam::profile_point(alpha, &p).unwrap();
        prop_assert!((c.distance(q) - p.r_whl).abs() < 1e-9);
        let a = cam::normal_angle(alpha, &p).unwrap();
        let fd = cam::normal_angle_fd(alpha, &p, 1e-4).unwrap();
        prop_assert!((a - fd).abs() < 1e-5, "analytic {a} vs finite difference {fd}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn stability_scales_with_force_limit(alpha in in_stroke(), s in 0.1..20.0f64) {
        let p = ToolParams::default();
        let base = pad_stability(alpha, &p, &StabilityConfig::default()).unwrap();
        let scaled = pad_stability(alpha, &p, &StabilityConfig { force_limit: s, ..StabilityConfig::default() }).unwrap();
        prop_assert!((scaled - s * base).abs() <= 1e-9 * s.max(1.0));
    }

    #[test]
    fn adding_a_contact_never_lowers_stability(alpha in in_stroke(), drop in 0usize..6) {
        let p = ToolParams::default();
        let cfg = StabilityConfig::default();
        let contacts = pad_contacts(alpha, &p, &cfg).unwrap();
        let scale = cfg.torque_scale_for(&p);
        let full = stability_index(&grasp_wrench_set(&contacts, cfg.n_edges, scale).unwrap());
        let mut fewer = contacts.clone();
        fewer.remove(drop);
        let partial = grasp_wrench_set(&fewer, cfg.n_edges, scale)
            .map(|ws| stability_index(&ws))
            .unwrap_or(0.0);
        prop_assert!(full >= partial - 1e-12, "full {full} < partial {partial} without contact {drop}");
    }
}

fn unit(v: Vector3<f64>) -> Vector3<f64> {
    v / v.norm()
}

proptest! {
    #[test]
    fn spiral_matches_closed_sum(
        roll in -1.0..1.0f64,
        pitch in -1.0..1.0f64,
        d_theta in 1.0..45.0f64,
        d_r in 0.001..0.2f64,
        theta_0 in 0.0..360.0f64,
        r_0 in 0.0..0.5f64,
        n in 1usize..60,
    ) {
        let rot = Rotation3::from_euler_angles(roll, pitch, 0.0);
        let v_att = rot * -Vector3::z();
        let v_sprl = rot * Vector3::x();
        let plan = SpiralPlan::new(v_att, v_sprl, d_theta, d_r, theta_0, r_0).unwrap();
        let p0 = Vector3::new(1.0, -2.0, 3.0);
        let path = spiral_waypoints(p0, &plan, n);
        let mut expect = p0;
        for (j, p) in path.iter().enumerate().skip(1) {
            let th = (theta_0 + j as f64 * d_theta).to_radians();
            let (u, w) = (v_sprl, v_att.cross(&v_sprl));
            expect += (r_0 + j as f64 * d_r) * (u * th.cos() + w * th.sin());
            prop_assert!((p - expect).norm() < 1e-9);
            prop_assert!((p - p0).dot(&v_att).abs() < 1e-9);
        }
    }

    #[test]
    fn impedance_step_is_linear(
        a in prop::array::uniform12(-10.0..10.0f64),
        b in prop::array::uniform12(-10.0..10.0f64),
        k in 0.1..10.0f64,
        standard in any::<bool>(),
    ) {
        let gains = ImpedanceGains {
            k,
            form: if standard { DampingForm::Standard } else { DampingForm::AsPrinted },
            ..ImpedanceGains::default()
        };
        let state = |x: &[f64; 12]| ImpedanceState {
            p_prev: Vector3::new(x[0], x[1], x[2]),
            p_curr: Vector3::new(x[3], x[4], x[5]),
            gains,
            f_insrt: Vector3::new(x[6], x[7], x[8]),
            f_rsst: Vector3::new(x[9], x[10], x[11]),
        };
        let sum: [f64; 12] = std::array::from_fn(|i| a[i] + b[i]);
        let lhs = impedance_step(&state(&sum));
        let rhs = impedance_step(&state(&a)) + impedance_step(&state(&b));
        prop_assert!((lhs - rhs).norm() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn insertion_succeeds_within_search_bound(
        offset in 0.0..4.0f64,
        dir in 0.0..360.0f64,
        yaw in 0.0..60.0f64,
        socket_rpy in prop::array::uniform3(-0.4..0.4f64),
        socket_t in prop::array::uniform3(-50.0..50.0f64),
    ) {
        let s = Scenario {
            world: insertion::InsertionWorld {
                socket_pose: Isometry3::new(Vector3::from(socket_t), Vector3::from(socket_rpy)),
                ..Default::default()
            },
            start_local: Vector3::new(offset * dir.to_radians().cos(), offset * dir.to_radians().sin(), 2.0),
            yaw_offset: yaw,
            ..Scenario::default()
        };
        let out = insertion::run_scenario(&s).unwrap();
        prop_assert!(out.insertion.success, "offset {offset} dir {dir} yaw {yaw}: {:?}", out.insertion);
        let axis = unit(s.world.attack_vector());
        prop_assert!(axis.norm() > 0.0);
    }
}

#[test]
fn default_stroke_bounds() {
    let b = stroke();
    assert_relative_eq!(b.alpha_min, 19.7246, epsilon = 1e-4);
    assert_relative_eq!(b.alpha_init, 61.0450, epsilon = 1e-4);
}
