mod common;

use common::oracle;
use hybrid_nlm::dswt::{forward, inverse, Orientation, WaveletFilters, WaveletId};
use hybrid_nlm::{add_awgn, Image, NoiseSpec};

fn max_err(a: &Image, b: &Image) -> f64 {
    oracle::max_abs_diff(a.data(), b.data())
}

#[test]
fn perfect_reconstruction_various_sizes() {
    let sizes = [(33, 47), (64, 64), (100, 37), (47, 90), (128, 96)];
    for (k, &(w, h)) in sizes.iter().enumerate() {
        let img = oracle::random_image(w, h, k as u64, 255.0);
        for id in WaveletId::ALL {
            let f = WaveletFilters::new(id);
            for levels in 1..=3 {
                let back = inverse(&forward(&img, levels, &f).unwrap(), &f).unwrap();
                assert!(max_err(&img, &back) < 1e-9, "{w}x{h} {id} J={levels}");
            }
        }
    }
}

#[test]
fn haar_impulse_matches_direct_convolution() {
    let img = Image::from_fn(16, 16, |r, c| if (r, c) == (8, 8) { 1.0 } else { 0.0 }).unwrap();
    let f = WaveletFilters::new(WaveletId::Haar);
    let pyr = forward(&img, 1, &f).unwrap();
    let [x, y, xy] = oracle::haar_level1(&img);
    assert!(oracle::max_abs_diff(pyr.details[0].band(Orientation::X).data(), &x) < 1e-15);
    assert!(oracle::max_abs_diff(pyr.details[0].band(Orientation::Y).data(), &y) < 1e-15);
    assert!(oracle::max_abs_diff(pyr.details[0].band(Orientation::XY).data(), &xy) < 1e-15);
}

#[test]
fn haar_random_matches_direct_convolution() {
    let img = oracle::random_image(20, 14, 3, 255.0);
    let pyr = forward(&img, 1, &WaveletFilters::new(WaveletId::Haar)).unwrap();
    let [x, y, xy] = oracle::haar_level1(&img);
    assert!(oracle::max_abs_diff(pyr.details[0].x.data(), &x) < 1e-12);
    assert!(oracle::max_abs_diff(pyr.details[0].y.data(), &y) < 1e-12);
    assert!(oracle::max_abs_diff(pyr.details[0].xy.data(), &xy) < 1e-12);
}

#[test]
fn synthesis_is_linear() {
    let f = WaveletFilters::new(WaveletId::Db4);
    for seed in 0..5 {
        let p1 = forward(&oracle::random_image(48, 40, seed, 255.0), 2, &f).unwrap();
        let p2 = forward(&oracle::random_image(48, 40, seed + 50, 255.0), 2, &f).unwrap();
        // perturb the pyramids so they are not images of anything in particular
        let p2 = p2.linear_combination(1.0, &p1, -0.3).unwrap();
        let (a, b) = (0.7, -2.5);
        let lhs = inverse(&p1.linear_combination(a, &p2, b).unwrap(), &f).unwrap();
        let r1 = inverse(&p1, &f).unwrap();
        let r2 = inverse(&p2, &f).unwrap();
        let rhs = r1.zip_map(&r2, |u, v| a * u + b * v).unwrap();
        assert!(max_err(&lhs, &rhs) < 1e-9);
    }
}

fn roll(img: &Image, dr: usize, dc: usize) -> Image {
    let (w, h) = img.dims();
    Image::from_fn(w, h, |r, c| img.get((r + h - dr) % h, (c + w - dc) % w)).unwrap()
}

#[test]
fn shift_covariance() {
    let img = oracle::random_image(40, 36, 11, 255.0);
    for id in WaveletId::ALL {
        let f = WaveletFilters::new(id);
        let a = forward(&roll(&img, 5, 3), 2, &f).unwrap();
        let b = forward(&img, 2, &f).unwrap();
        for ((_, _, x), (_, _, y)) in a.bands().zip(b.bands()) {
            assert!(max_err(x, &roll(y, 5, 3)) < 1e-12);
        }
        assert!(max_err(&a.approx, &roll(&b.approx, 5, 3)) < 1e-12);
    }
}

#[test]
fn detail_bands_have_zero_mean() {
    let img = oracle::random_image(64, 64, 5, 255.0);
    for id in WaveletId::ALL {
        let pyr = forward(&img, 3, &WaveletFilters::new(id)).unwrap();
        for (j, o, band) in pyr.bands() {
            let std = band.variance().sqrt();
            assert!(band.mean().abs() < 1e-6 * std, "{id} level {j} {o:?}");
        }
    }
}

/// Squared norm of `h * (h up 2) * ... * (last up 2^(j-1))` by explicit
/// convolution of the dilated taps.
fn cascade_norm2(lo: &[f64], last: &[f64], level: usize) -> f64 {
    let dilate = |taps: &[f64], s: usize| {
        let mut v = vec![0.0; (taps.len() - 1) * s + 1];
        for (k, &t) in taps.iter().enumerate() {
            v[k * s] = t;
        }
        v
    };
    let conv = |a: &[f64], b: &[f64]| {
        let mut out = vec![0.0; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    };
    let mut eff = vec![1.0];
    for j in 1..level {
        eff = conv(&eff, &dilate(lo, 1 << (j - 1)));
    }
    eff = conv(&eff, &dilate(last, 1 << (level - 1)));
    eff.iter().map(|v| v * v).sum()
}

#[test]
fn white_noise_band_variance_matches_filter_norms() {
    let sigma = 20.0;
    let noise = add_awgn(&Image::filled(256, 256, 0.0).unwrap(), NoiseSpec::new(sigma, 99).unwrap()).unwrap();
    for id in WaveletId::ALL {
        let f = WaveletFilters::new(id);
        let pyr = forward(&noise, 3, &f).unwrap();
        for (j, o, band) in pyr.bands() {
            let lo = cascade_norm2(&f.lowpass, &f.lowpass, j);
            let hi = cascade_norm2(&f.lowpass, &f.highpass, j);
            let gain = match o {
                Orientation::X | Orientation::Y => lo * hi,
                Orientation::XY => hi * hi,
            };
            let expected = sigma * sigma * gain;
            let rel = (band.variance() - expected).abs() / expected;
            assert!(rel < 0.05, "{id} level {j} {o:?}: {} vs {expected} ({rel})", band.variance());
        }
    }
}
