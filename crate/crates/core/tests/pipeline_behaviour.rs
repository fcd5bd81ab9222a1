use hybrid_nlm::dswt::{forward, inverse, WaveletFilters};
use hybrid_nlm::imaging::mse;
use hybrid_nlm::pipeline::{self, DenoiseParams, PipelineEvent, ReferenceSource};
use hybrid_nlm::{add_awgn, psnr, Image, NoiseSpec};

fn scene(w: usize, h: usize) -> Image {
    Image::from_fn(w, h, |r, c| {
        let (x, y) = (c as f64, r as f64);
        let disc = if (x - 30.0).powi(2) + (y - 28.0).powi(2) < 225.0 { 90.0 } else { 0.0 };
        let stripes = if ((x + 0.5 * y) as usize / 6).is_multiple_of(2) { 40.0 } else { 0.0 };
        60.0 + disc + stripes + 0.5 * x
    })
    .unwrap()
}

#[test]
fn both_stages_improve_on_the_noisy_input() {
    let clean = scene(64, 64);
    for sigma in [10.0, 25.0, 50.0] {
        let noisy = add_awgn(&clean, NoiseSpec::new(sigma, 17).unwrap()).unwrap();
        let out = pipeline::denoise_full(&noisy, &DenoiseParams::defaults(sigma)).unwrap();
        let p_noisy = psnr(&clean, &noisy).unwrap().as_f64();
        let p_pre = psnr(&clean, &out.pre_denoised).unwrap().as_f64();
        let p_final = psnr(&clean, &out.final_image).unwrap().as_f64();
        assert!(p_pre > p_noisy + 1.0, "sigma {sigma}: {p_pre} vs {p_noisy}");
        assert!(p_final > p_noisy + 3.0, "sigma {sigma}: {p_final} vs {p_noisy}");
        assert_eq!(out.band_stats.len(), 6);
    }
}

#[test]
fn larger_h_flattens_detail_bands() {
    let clean = scene(48, 48);
    let sigma = 20.0;
    let noisy = add_awgn(&clean, NoiseSpec::new(sigma, 4).unwrap()).unwrap();
    let p = DenoiseParams::defaults(sigma);
    let filters = WaveletFilters::new(p.wavelet);
    let mut zeroed = forward(&noisy, p.levels, &filters).unwrap();
    for level in &mut zeroed.details {
        for band in [&mut level.x, &mut level.y, &mut level.xy] {
            *band = band.map(|_| 0.0).unwrap();
        }
    }
    let smooth = inverse(&zeroed, &filters).unwrap();
    let run = |factor: f64| {
        let out = pipeline::denoise_full(&noisy, &DenoiseParams::with_factors(sigma, factor, 3.87)).unwrap();
        (mse(&smooth, &out.pre_denoised).unwrap(), out.band_stats)
    };
    let mut prev_dist = f64::INFINITY;
    let mut prev_var = [f64::INFINITY; 6];
    for factor in [3.0, 6.0, 20.0, 60.0] {
        let (dist, stats) = run(factor);
        assert!(dist < prev_dist, "h = {factor} sigma: {dist} vs {prev_dist}");
        prev_dist = dist;
        for (k, s) in stats.iter().enumerate() {
            assert!(s.after.variance <= s.before.variance);
            assert!(s.after.variance < prev_var[k], "h = {factor} sigma, band {k}");
            prev_var[k] = s.after.variance;
        }
    }
    // beyond this the weights saturate and each band is a plain window average
    let (far, _) = run(600.0);
    let (base, _) = run(6.0);
    assert!(far < 0.01 * base, "{far} vs {base}");
}

#[test]
fn more_noise_means_more_error() {
    let clean = scene(64, 64);
    let err = |sigma: f64| {
        let noisy = add_awgn(&clean, NoiseSpec::new(sigma, 8).unwrap()).unwrap();
        let out = pipeline::denoise_full(&noisy, &DenoiseParams::defaults(sigma)).unwrap();
        mse(&clean, &out.final_image).unwrap()
    };
    assert!(err(10.0) < err(25.0));
}

#[test]
fn noisy_reference_skips_stage_one_output() {
    let clean = scene(40, 40);
    let noisy = add_awgn(&clean, NoiseSpec::new(20.0, 2).unwrap()).unwrap();
    let mut params = DenoiseParams::defaults(20.0);
    params.reference = ReferenceSource::Noisy;
    let out = pipeline::denoise_full(&noisy, &params).unwrap();
    let direct = hybrid_nlm::modified_nlm::denoise(&noisy, &noisy, &params.stage2).unwrap();
    assert_eq!(out.final_image, direct);
}

#[test]
fn observer_sees_every_band_and_the_self_weight_rule() {
    let noisy = add_awgn(&scene(32, 32), NoiseSpec::new(15.0, 1).unwrap()).unwrap();
    let denoiser = pipeline::Denoiser::new(DenoiseParams::defaults(15.0)).unwrap();
    let mut bands = 0;
    let mut boost = None;
    denoiser
        .denoise_full_observed(&noisy, &mut |e| match e {
            PipelineEvent::BandFiltered(_) => bands += 1,
            PipelineEvent::SelfWeightRule { boost: b } => boost = Some(*b),
            _ => {}
        })
        .unwrap();
    assert_eq!(bands, 6);
    assert_eq!(boost, Some(4.0 / 3.0));
}

#[test]
fn invalid_parameters_are_rejected() {
    let noisy = scene(16, 16);
    let mut p = DenoiseParams::defaults(0.0);
    assert!(pipeline::denoise_full(&noisy, &p).is_err());
    p = DenoiseParams::defaults(10.0);
    p.stage2.patch_side = 4;
    assert!(pipeline::denoise_full(&noisy, &p).is_err());
    p = DenoiseParams::defaults(10.0);
    p.levels = 7;
    assert!(pipeline::denoise_full(&noisy, &p).is_err());
}
