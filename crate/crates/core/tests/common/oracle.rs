//! Brute-force reference implementations. Nothing here calls into the
//! filtering code under test; only the `ImageGrid` container is shared.
#![allow(dead_code, clippy::needless_range_loop)]

use hybrid_nlm::Image;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_image(w: usize, h: usize, seed: u64, scale: f64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Image::from_fn(w, h, |_, _| rng.gen::<f64>() * scale).unwrap()
}

/// Mirror-without-repeat reflection by repeated folding.
pub fn fold(mut i: i64, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let n = n as i64;
    loop {
        if i < 0 {
            i = -i;
        } else if i >= n {
            i = 2 * (n - 1) - i;
        } else {
            return i as usize;
        }
    }
}

pub fn at(img: &Image, r: i64, c: i64) -> f64 {
    img.get(fold(r, img.height()), fold(c, img.width()))
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn gaussian(m: usize, alpha: f64) -> Vec<Vec<f64>> {
    let half = (m / 2) as i64;
    let mut k = vec![vec![0.0; m]; m];
    let mut total = 0.0;
    for a in 0..m {
        for b in 0..m {
            let dy = a as i64 - half;
            let dx = b as i64 - half;
            k[a][b] = (-((dy * dy + dx * dx) as f64) / (2.0 * alpha * alpha)).exp();
            total += k[a][b];
        }
    }
    for row in k.iter_mut() {
        for v in row.iter_mut() {
            *v /= total;
        }
    }
    k
}

pub struct BlockOracle {
    pub patch: usize,
    pub window: usize,
    pub h: f64,
    pub alpha: f64,
    pub step: usize,
    pub raw: bool,
}

/// Blockwise NLM by direct loops over block centres, window offsets and
/// patch pixels.
pub fn block_nlm(band: &Image, o: &BlockOracle) -> Vec<f64> {
    let (w, h) = band.dims();
    let m = o.patch;
    let hp = (m / 2) as i64;
    let hw = (o.window / 2) as i64;
    let kernel = gaussian(m, o.alpha);
    let scale = if o.raw { (m * m) as f64 } else { 1.0 };
    let centres = |n: usize| {
        let mut v = Vec::new();
        let mut i = 0;
        while i < n {
            v.push(i);
            i += o.step;
        }
        if *v.last().unwrap() != n - 1 {
            v.push(n - 1);
        }
        v
    };
    let mut sum = vec![0.0; w * h];
    let mut cnt = vec![0.0; w * h];
    for &r in &centres(h) {
        for &c in &centres(w) {
            let (r, c) = (r as i64, c as i64);
            let mut weights = Vec::new();
            let mut best: f64 = 0.0;
            for dy in -hw..=hw {
                for dx in -hw..=hw {
                    if dy == 0 && dx == 0 {
                        weights.push((dy, dx, f64::NAN));
                        continue;
                    }
                    let mut d2 = 0.0;
                    for a in -hp..=hp {
                        for b in -hp..=hp {
                            let diff = at(band, r + a, c + b) - at(band, r + dy + a, c + dx + b);
                            d2 += kernel[(a + hp) as usize][(b + hp) as usize] * diff * diff;
                        }
                    }
                    let wt = (-d2 * scale / (o.h * o.h)).exp();
                    best = best.max(wt);
                    weights.push((dy, dx, wt));
                }
            }
            let own = if best > 0.0 { best } else { 1.0 };
            for e in weights.iter_mut() {
                if e.2.is_nan() {
                    e.2 = own;
                }
            }
            let norm: f64 = weights.iter().map(|e| e.2).sum();
            for a in -hp..=hp {
                for b in -hp..=hp {
                    let (y, x) = (r + a, c + b);
                    if y < 0 || x < 0 || y >= h as i64 || x >= w as i64 {
                        continue;
                    }
                    let mut est = 0.0;
                    for &(dy, dx, wt) in &weights {
                        est += wt * at(band, y + dy, x + dx);
                    }
                    let k = y as usize * w + x as usize;
                    sum[k] += est / norm;
                    cnt[k] += 1.0;
                }
            }
        }
    }
    sum.iter().zip(&cnt).map(|(s, n)| s / n).collect()
}

pub fn grad_x(img: &Image, r: i64, c: i64) -> f64 {
    (at(img, r, c + 1) - at(img, r, c - 1)) / 2.0
}

pub fn grad_y(img: &Image, r: i64, c: i64) -> f64 {
    (at(img, r + 1, c) - at(img, r - 1, c)) / 2.0
}

fn normal(img: &Image, r: i64, c: i64, unit: bool) -> Vec<f64> {
    let (gx, gy) = (grad_x(img, r, c), grad_y(img, r, c));
    if unit {
        let n = (1.0 + gx * gx + gy * gy).sqrt();
        vec![-gx / n, -gy / n, 1.0 / n]
    } else {
        vec![gx, gy]
    }
}

/// Orientation factor from a list of Γ entries.
pub fn eta_of(gamma: &[f64], m: usize) -> f64 {
    let mut biggest: f64 = 0.0;
    let mut total = 0.0;
    for &g in gamma {
        biggest = biggest.max(g.abs());
        total += g;
    }
    if biggest <= 1e-12 {
        return 1.0;
    }
    let m2 = (m * m) as f64;
    let bound = m2 / (m2 - 1.0);
    let e = -total / ((m2 - 1.0) * biggest);
    e.clamp(-bound, bound).exp()
}

pub struct ModOracle {
    pub patch: usize,
    pub window: usize,
    pub h: f64,
    pub sigma: f64,
    pub boost: f64,
    pub boost_sigma_max: f64,
    pub raw: bool,
    pub use_eta: bool,
    pub unit_normals: bool,
}

impl ModOracle {
    pub fn new(patch: usize, window: usize, h: f64, sigma: f64) -> Self {
        Self {
            patch,
            window,
            h,
            sigma,
            boost: 4.0 / 3.0,
            boost_sigma_max: 20.0,
            raw: true,
            use_eta: true,
            unit_normals: false,
        }
    }
}

/// Weight between pixels `i` and `j` (reflection applied to all reads).
pub fn mod_weight(reference: &Image, i: (i64, i64), j: (i64, i64), o: &ModOracle) -> f64 {
    let hp = (o.patch / 2) as i64;
    let mut d2 = 0.0;
    let mut gamma = Vec::new();
    for a in -hp..=hp {
        for b in -hp..=hp {
            let diff = at(reference, i.0 + a, i.1 + b) - at(reference, j.0 + a, j.1 + b);
            d2 += diff * diff;
            let ni = normal(reference, i.0 + a, i.1 + b, o.unit_normals);
            let nj = normal(reference, j.0 + a, j.1 + b, o.unit_normals);
            gamma.push(ni.iter().zip(&nj).map(|(x, y)| x * y).sum::<f64>());
        }
    }
    if !o.raw {
        d2 /= (o.patch * o.patch) as f64;
    }
    let eta = if o.use_eta { eta_of(&gamma, o.patch) } else { 1.0 };
    (-d2 * eta / (o.h * o.h)).exp()
}

/// Pixelwise modified NLM by direct loops.
pub fn modified_nlm(noisy: &Image, reference: &Image, o: &ModOracle) -> Vec<f64> {
    let (w, h) = noisy.dims();
    let hw = (o.window / 2) as i64;
    let mut out = Vec::with_capacity(w * h);
    for r in 0..h as i64 {
        for c in 0..w as i64 {
            let mut num = 0.0;
            let mut den = 0.0;
            let mut best: f64 = 0.0;
            for dy in -hw..=hw {
                for dx in -hw..=hw {
                    if dy == 0 && dx == 0 {
                        continue;
                    }
                    let wt = mod_weight(reference, (r, c), (r + dy, c + dx), o);
                    best = best.max(wt);
                    num += wt * at(noisy, r + dy, c + dx);
                    den += wt;
                }
            }
            let base = if best > 0.0 { best } else { 1.0 };
            let own = if o.sigma > o.boost_sigma_max { base } else { o.boost * base };
            out.push((own * at(noisy, r, c) + num) / (own + den));
        }
    }
    out
}

/// Level-1 Haar detail bands `(x, y, xy)` by explicit 2x2 periodic sums.
pub fn haar_level1(img: &Image) -> [Vec<f64>; 3] {
    let (w, h) = img.dims();
    let u = |r: usize, c: usize| img.get(r % h, c % w);
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut xy = Vec::new();
    for r in 0..h {
        for c in 0..w {
            let (a, b, cc, d) = (u(r, c), u(r, c + 1), u(r + 1, c), u(r + 1, c + 1));
            // lowpass (1, 1)/sqrt2, highpass (1, -1)/sqrt2, applied as correlation
            x.push(0.5 * ((a - b) + (cc - d)));
            y.push(0.5 * ((a + b) - (cc + d)));
            xy.push(0.5 * ((a - b) - (cc - d)));
        }
    }
    [x, y, xy]
}
