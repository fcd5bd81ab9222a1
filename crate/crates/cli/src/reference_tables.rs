//! Published PSNR figures (dB) for the five standard test images, used as
//! comparison columns in benchmark reports.

pub const METHODS: [&str; 5] = ["BM3D", "GSM", "KSVD", "BNLM", "Proposed"];
pub const SIGMAS: [u32; 5] = [10, 15, 20, 25, 50];
pub const IMAGES: [&str; 5] = ["lena", "barbara", "boats", "peppers", "house"];

/// `PER_IMAGE[image][sigma index][method index]`.
const PER_IMAGE: [[[f64; 5]; 5]; 5] = [
    // lena
    [
        [35.93, 35.61, 35.47, 35.25, 35.40],
        [34.27, 33.90, 33.70, 33.68, 33.93],
        [33.05, 32.66, 32.38, 32.63, 32.75],
        [32.05, 31.69, 31.32, 31.55, 31.76],
        [28.86, 28.61, 27.79, 27.51, 28.47],
    ],
    // barbara
    [
        [34.98, 34.03, 34.42, 33.83, 33.80],
        [33.11, 31.86, 32.37, 32.21, 32.35],
        [31.78, 30.32, 30.83, 30.88, 31.13],
        [30.72, 29.13, 29.60, 29.77, 30.07],
        [27.17, 25.48, 25.47, 24.91, 26.41],
    ],
    // boats
    [
        [33.92, 33.58, 33.64, 33.18, 32.94],
        [32.14, 31.70, 31.73, 31.45, 31.52],
        [30.88, 30.38, 30.36, 30.16, 30.42],
        [29.91, 29.37, 29.28, 29.11, 29.43],
        [26.64, 26.38, 25.95, 25.13, 26.22],
    ],
    // peppers
    [
        [34.68, 33.77, 34.28, 33.87, 33.53],
        [32.70, 31.74, 32.22, 32.06, 32.03],
        [31.29, 30.31, 30.82, 30.75, 30.82],
        [30.16, 29.21, 29.73, 29.77, 29.78],
        [26.41, 25.90, 26.13, 23.84, 26.28],
    ],
    // house
    [
        [36.71, 35.35, 35.98, 35.67, 35.78],
        [34.94, 33.64, 34.32, 34.23, 34.23],
        [33.77, 32.39, 33.20, 33.24, 33.11],
        [32.86, 31.40, 32.15, 32.30, 32.15],
        [29.37, 28.26, 27.95, 27.64, 28.38],
    ],
];

/// `AVERAGES[sigma index][method index]`: means over the five images.
const AVERAGES: [[f64; 5]; 5] = [
    [35.24, 34.47, 34.76, 34.36, 34.29],
    [33.43, 32.57, 32.87, 32.73, 32.81],
    [32.15, 31.21, 31.52, 31.53, 31.65],
    [31.14, 30.16, 30.42, 30.50, 30.63],
    [27.69, 26.93, 26.66, 25.81, 27.15],
];

fn sigma_index(sigma: f64) -> Option<usize> {
    SIGMAS.iter().position(|&s| (s as f64 - sigma).abs() < 1e-9)
}

fn image_index(name: &str) -> Option<usize> {
    IMAGES.iter().position(|&n| n.eq_ignore_ascii_case(name))
}

/// All five published values for `(image, sigma)`, in [`METHODS`] order.
pub fn per_image(image: &str, sigma: f64) -> Option<[f64; 5]> {
    Some(PER_IMAGE[image_index(image)?][sigma_index(sigma)?])
}

/// The proposed method's published PSNR for `(image, sigma)`.
pub fn proposed(image: &str, sigma: f64) -> Option<f64> {
    per_image(image, sigma).map(|row| row[4])
}

pub fn averages(sigma: f64) -> Option<[f64; 5]> {
    Some(AVERAGES[sigma_index(sigma)?])
}
