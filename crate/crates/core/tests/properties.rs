mod support;

use proptest::prelude::*;
use vafr::baselines::{sr_lafr, sr_lmfr, BaselineParams, StepProfile};
use vafr::foveate::{foveate, lp_antialias, FoveationParams};
use vafr::lpbuffer::LpLayout;
use vafr::mapping::{DeltaSpec, Forward, MappingContext};
use vafr::{AcuityModel, Image, LpBuffer};

fn ctx(w: u32, h: u32, gaze: (f64, f64), c_r: f64) -> MappingContext {
    MappingContext::new(AcuityModel::default(), c_r, (w, h), gaze, DeltaSpec::default()).unwrap()
}

/// Display, gaze anywhere on it (corners included) and a point on it.
fn display_gaze_point() -> impl Strategy<Value = ((u32, u32), (f64, f64), (f64, f64))> {
    (64u32..4000, 64u32..3000).prop_flat_map(|(w, h)| {
        let (fw, fh) = (f64::from(w), f64::from(h));
        (Just((w, h)), (0.0..=fw, 0.0..=fh), (0.0..=fw, 0.0..=fh))
    })
}

/// Cheap deterministic hash to fill buffers.
fn hash(u: usize, v: usize, seed: u64) -> u64 {
    let mut x = (u as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (v as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F) ^ seed;
    x ^= x >> 31;
    x = x.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x ^ (x >> 29)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn forward_inverse_roundtrip(((w, h), gaze, (x, y)) in display_gaze_point(), cr_scale in 0.3f64..3.0) {
        let c = ctx(w, h, gaze, cr_scale / f64::from(h));
        match c.forward(x, y).unwrap() {
            Forward::Inside { u, v } => {
                let (bx, by) = c.inverse(u, v).unwrap();
                // the polar angle is undefined at the gaze itself
                let r = (x - gaze.0).hypot(y - gaze.1);
                let tol = 1e-7 * (1.0 + r);
                prop_assert!((bx - x).abs() <= tol && (by - y).abs() <= tol, "({x}, {y}) -> ({bx}, {by})");
            }
            Forward::Outside(p) => prop_assert!(p.e >= c.e_max()),
        }
    }

    #[test]
    fn buffer_dims_ignore_display_and_gaze(((w, h), gaze, _) in display_gaze_point(), cr_scale in 0.1f64..10.0) {
        let c = ctx(w, h, gaze, cr_scale / f64::from(h));
        prop_assert_eq!((c.lp_w(), c.lp_h()), (901, 1638));
        prop_assert_eq!(LpLayout::new(&c).valid_count(), 1_062_877);
    }

    #[test]
    fn u_is_increasing_and_inverts(a in 0.0f64..60.0, b in 0.0f64..60.0) {
        let m = AcuityModel::default();
        let c = ctx(100, 100, (50.0, 50.0), 0.01);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-9);
        prop_assert!(c.u_of_e(lo).unwrap() < c.u_of_e(hi).unwrap());
        let back = c.e_of_u(c.u_of_e(a).unwrap()).unwrap();
        prop_assert!((back - a).abs() < 1e-9);
        // closed form agrees with quadrature of twice the acuity
        prop_assert!((c.u_of_e(a).unwrap() - support::u_of_e(a)).abs() < 1e-8);
        prop_assert!((m.shading_rate(a).unwrap() - support::acuity(a)).abs() < 1e-9);
    }

    #[test]
    fn adapted_model_is_capped_acuity(cap in 1.0f64..60.0, e in 0.0f64..60.0) {
        let m = AcuityModel::default().adapt_to_device(cap).unwrap();
        let want = support::acuity(e).min(cap);
        prop_assert!((m.acuity(e).unwrap() - want).abs() < 1e-9 * want.max(1.0), "cap {cap} e {e}");
    }

    #[test]
    fn lmfr_is_linear_in_width(k in 1u32..8, e in 2.0f64..55.0) {
        let p = BaselineParams::new(1440, 1700);
        let scaled = BaselineParams { width: p.width * k, ..p };
        if let (Ok(a), Ok(b)) = (sr_lmfr(&p, e), sr_lmfr(&scaled, e)) {
            prop_assert!((b - f64::from(k) * a).abs() <= 1e-12 * b.abs());
        }
        if let (Ok(a), Ok(b)) = (sr_lafr(&p, e), sr_lafr(&scaled, e)) {
            prop_assert!((b - f64::from(k) * a).abs() <= 1e-12 * b.abs());
        }
    }

    #[test]
    fn step_profile_is_right_open(t0 in 1.0f64..20.0, gap in 0.5f64..20.0, e in 0.0f64..60.0) {
        let p = StepProfile { thresholds: vec![t0, t0 + gap], rates: vec![40.0, 16.0, 8.0] };
        p.validate().unwrap();
        let want = if e < t0 { 40.0 } else if e < t0 + gap { 16.0 } else { 8.0 };
        prop_assert_eq!(p.rate(e), want);
        prop_assert_eq!(p.rate(t0), 16.0);
    }

    #[test]
    fn delta_table_stays_within_its_values(e in -10.0f64..80.0, d0 in 0.1f64..4.0, d1 in 0.1f64..4.0) {
        let spec = DeltaSpec::Table(vec![(10.0, d0), (40.0, d1)]);
        let v = spec.eval(e);
        prop_assert!(v >= d0.min(d1) - 1e-12 && v <= d0.max(d1) + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn fxaa_output_within_input_range(seed in any::<u64>(), span in 1u64..256) {
        let c = ctx(640, 480, (320.0, 240.0), 1.0 / 480.0);
        let mut buf = LpBuffer::<[f32; 4]>::build(&c);
        buf.par_fill_with(|u, v| {
            let h = hash(u, v, seed);
            let g = (h % span) as f32 / 255.0;
            [g, ((h >> 8) % span) as f32 / 255.0, g, 1.0]
        });
        let out = lp_antialias(&buf);
        let hi = (span - 1) as f32 / 255.0;
        for u in 0..out.width() {
            for v in 0..out.column_height(u) {
                let t = out.get(u, v);
                for ch in &t[..3] {
                    prop_assert!((0.0..=hi + 1e-6).contains(ch));
                }
                prop_assert!((t[3] - 1.0).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn foveation_is_deterministic_for_any_gaze(gx in 0.0f64..=320.0, gy in 0.0f64..=240.0, seed in any::<u64>()) {
        let data: Vec<u8> = (0..320 * 240 * 3).map(|i| hash(i, 7, seed) as u8).collect();
        let img = Image::from_raw(320, 240, 3, data).unwrap();
        let c = ctx(320, 240, (160.0, 120.0), 1.0 / 240.0);
        let params = FoveationParams::new((gx, gy));
        let a = foveate(&img, &c, &params).unwrap();
        let b = foveate(&img, &c, &params).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn sample_wraps_in_angle() {
    let c = ctx(640, 480, (320.0, 240.0), 1.0 / 480.0);
    let mut buf = LpBuffer::<[f32; 4]>::build(&c);
    buf.par_fill_with(|u, v| [(hash(u, v, 1) % 256) as f32 / 255.0, 0.0, 0.0, 1.0]);
    for u in [0.2, 1.0, 37.5, 400.25, 900.9] {
        for turn in [0.0, 0.013, 0.5, 0.999] {
            let a = buf.sample(u, turn);
            let b = buf.sample(u, turn + 1.0);
            let d = buf.sample(u, turn - 1.0);
            for i in 0..4 {
                assert!((a[i] - b[i]).abs() < 1e-5 && (a[i] - d[i]).abs() < 1e-5);
            }
        }
    }
}
