use proptest::prelude::*;

use roisim::analog_sensor::{
    adc_convert, analog_average, pool_frame, quantize, reconstruct, resistor_network_node_voltage,
    AnalogFrame, CircuitParams, ColorMode, PixelArray, SensorConfig,
};
use roisim::cost_model::{analytical_costs, energy, union_area, CostInputs, EnergyParams};
use roisim::roi_protocol::{oracle_detector, run_baseline, run_two_stage, RoiBox};
use roisim::validate::observed_costs;

fn volts(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..=1.0, 1..=max_len)
}

/// Dimensions that `k` divides, all at most 64.
fn geometry() -> impl Strategy<Value = (u32, u32, u32)> {
    (1u32..=8).prop_flat_map(|k| (1..=64 / k, 1..=64 / k).prop_map(move |(a, b)| (a * k, b * k, k)))
}

fn boxes_in(n: u32, m: u32) -> impl Strategy<Value = Vec<RoiBox>> {
    prop::collection::vec(
        (0..n, 0..m).prop_flat_map(move |(x, y)| {
            (1..=n - x, 1..=m - y).prop_map(move |(w, h)| RoiBox::new(x, y, w, h))
        }),
        0..=8,
    )
}

fn array(n: u32, m: u32, seed: u64) -> PixelArray {
    let data = (0..n as u64 * m as u64 * 3)
        .map(|i| ((i.wrapping_mul(2654435761).wrapping_add(seed)) % 1000) as f64 / 999.0)
        .collect();
    PixelArray::new(n, m, 1.0, data).unwrap()
}

proptest! {
    #[test]
    fn node_voltage_bounded(xs in volts(192)) {
        let g = resistor_network_node_voltage(&xs, &CircuitParams::ideal(1.0), 1.0).unwrap();
        prop_assert!((-0.5 - 1e-12..=1e-12).contains(&g));
    }

    #[test]
    fn average_is_exact_mean(xs in volts(192)) {
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let avg = analog_average(&xs, &CircuitParams::ideal(1.0), 1.0).unwrap();
        prop_assert!((avg - mean).abs() < 1e-12);
    }

    #[test]
    fn gray_pool_is_mean_of_rgb_pools((n, m, k) in geometry(), seed in any::<u64>()) {
        let src = array(n, m, seed);
        let gray = pool_frame(&src, &SensorConfig::new(n, m, k, ColorMode::Gray).unwrap()).unwrap();
        let rgb = pool_frame(&src, &SensorConfig::new(n, m, k, ColorMode::Rgb).unwrap()).unwrap();
        prop_assert_eq!(gray.values.len() * 3, rgb.values.len());
        for (g, c) in gray.values.iter().zip(rgb.values.chunks(3)) {
            prop_assert!((g - (c[0] + c[1] + c[2]) / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn adc_monotone_and_idempotent(a in 0.0f64..=1.0, b in 0.0f64..=1.0, bits in 1u32..=16) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(quantize(lo, 1.0, bits) <= quantize(hi, 1.0, bits));
        let c = quantize(a, 1.0, bits);
        prop_assert_eq!(quantize(reconstruct(c, 1.0, bits), 1.0, bits), c);
    }

    #[test]
    fn conversion_count_conserved(w in 1u32..20, h in 1u32..20, gray in any::<bool>()) {
        let c = if gray { 1 } else { 3 };
        let frame = AnalogFrame { width: w, height: h, channels: c, vdd: 1.0, values: vec![0.3; (w * h * c) as usize] };
        let cfg = SensorConfig::new(1, 1, 1, ColorMode::Rgb).unwrap();
        let d = adc_convert(&frame, &cfg);
        prop_assert_eq!(d.conversion_count, (w * h * c) as u64);
        prop_assert_eq!(d.codes.len() as u64, d.conversion_count);
    }

    #[test]
    fn ledger_equals_formulas(
        ((n, m, k), annotations) in geometry().prop_flat_map(|g| (Just(g), boxes_in(g.0, g.1))),
        gray in any::<bool>(),
        bits in 1u32..=16,
        word in prop::sample::select(vec![8u32, 16, 32]),
    ) {
        let color = if gray { ColorMode::Gray } else { ColorMode::Rgb };
        let cfg = SensorConfig::new(n, m, k, color).unwrap().with_adc_bits(bits).unwrap().with_word_bits(word).unwrap();
        let src = array(n, m, 3);
        let two = run_two_stage(&src, &cfg, &oracle_detector(&annotations, k)).unwrap();
        let base = run_baseline(&src, &cfg).unwrap();
        let formula = analytical_costs(&CostInputs::from_config(&cfg, two.roi_boxes.clone())).unwrap();
        prop_assert_eq!(formula, observed_costs(&two, &base));
        prop_assert_eq!(two.ledger.totals(), &two.ledger.recount());
    }

    #[test]
    fn boxes_strictly_increase_traffic(
        ((n, m, k), annotations) in geometry().prop_flat_map(|g| (Just(g), boxes_in(g.0, g.1))),
    ) {
        let cfg = SensorConfig::new(n, m, k, ColorMode::Rgb).unwrap();
        let src = array(n, m, 1);
        let empty = run_two_stage(&src, &cfg, &oracle_detector(&[], k)).unwrap();
        let pooled_bytes = n as u64 * m as u64 * 3 / (k as u64 * k as u64);
        prop_assert_eq!(empty.ledger.totals().bytes_s_to_p, pooled_bytes);
        if !annotations.is_empty() {
            let with = run_two_stage(&src, &cfg, &oracle_detector(&annotations, k)).unwrap();
            prop_assert!(with.ledger.totals().bytes_s_to_p > pooled_bytes);
            prop_assert!(with.ledger.totals().total_conversions > empty.ledger.totals().total_conversions);
        }
    }

    #[test]
    fn d_new_monotone(
        ((n, m, k), rois) in geometry().prop_flat_map(|g| (Just(g), boxes_in(g.0, g.1))),
        idx in any::<prop::sample::Index>(),
    ) {
        let base = CostInputs::new(n, m, k).with_rois(rois.clone());
        let d = analytical_costs(&base).unwrap().d_new;
        // widening or heightening a box never lowers D_new
        if !rois.is_empty() {
            let i = idx.index(rois.len());
            let mut wider = rois.clone();
            wider[i].w += 1;
            wider[i].h += 1;
            prop_assert!(analytical_costs(&base.clone().with_rois(wider)).unwrap().d_new > d);
        }
        let gray = analytical_costs(&base.clone().with_stage1_channels(1)).unwrap().d_new;
        prop_assert!(gray <= d);
        // a coarser pool factor that still divides shrinks stage 1
        if k >= 2 && n % (2 * k) == 0 && m % (2 * k) == 0 {
            let mut coarser = base.clone();
            coarser.k = 2 * k;
            prop_assert!(analytical_costs(&coarser).unwrap().d_new < d);
        }
    }

    #[test]
    fn energy_tracks_conversions(
        ((n, m, k), rois) in geometry().prop_flat_map(|g| (Just(g), boxes_in(g.0, g.1))),
        e_pool in 0.0f64..1e-7,
    ) {
        let rep = analytical_costs(&CostInputs::new(n, m, k).with_rois(rois)).unwrap();
        let p = EnergyParams { e_pool_per_frame: e_pool, ..EnergyParams::default() };
        let e = energy(&rep, &p);
        let expect = rep.c_new as f64 * p.e_adc;
        prop_assert!(((e.e_total - e.e_pooling) - expect).abs() <= 1e-12 * expect.max(1e-30));
        prop_assert!((e.e_total - e.e_stage1 - e.e_stage2 - e.e_pooling).abs() < 1e-20);
    }

    #[test]
    fn union_never_exceeds_sum(
        ((n, m, k), rois) in geometry().prop_flat_map(|g| (Just(g), boxes_in(g.0, g.1))),
    ) {
        let sum_mode = analytical_costs(&CostInputs::new(n, m, k).with_rois(rois.clone())).unwrap();
        let mut dedup = CostInputs::new(n, m, k).with_rois(rois.clone());
        dedup.dedup_union = true;
        let union_mode = analytical_costs(&dedup).unwrap();
        prop_assert!(union_mode.d2_sp <= sum_mode.d2_sp);
        let disjoint = rois.iter().enumerate().all(|(i, a)| {
            rois[i + 1..].iter().all(|b| {
                let (ax, ay) = a.end();
                let (bx, by) = b.end();
                ax <= b.x as u64 || bx <= a.x as u64 || ay <= b.y as u64 || by <= a.y as u64
            })
        });
        let areas: u64 = rois.iter().map(RoiBox::area).sum();
        prop_assert_eq!(disjoint, union_area(&rois) == areas);
    }

    #[test]
    fn sessions_are_deterministic(
        ((n, m, k), annotations) in geometry().prop_flat_map(|g| (Just(g), boxes_in(g.0, g.1))),
        seed in any::<u64>(),
    ) {
        let mut cfg = SensorConfig::new(n, m, k, ColorMode::Gray).unwrap();
        cfg.circuit.mismatch_sigma = 0.02;
        cfg.circuit.rng_seed = seed;
        let src = array(n, m, seed);
        let det = oracle_detector(&annotations, k);
        let a = run_two_stage(&src, &cfg, &det).unwrap();
        let b = run_two_stage(&src, &cfg, &det).unwrap();
        prop_assert_eq!(a, b);
    }
}
