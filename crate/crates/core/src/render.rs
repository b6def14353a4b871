//! Binary PPM (P6) renders of grid sets, walks and polylines on the unit
//! square. Pixel row 0 is the top of the image, i.e. `y = 1`.

use crate::gridset::GridSet;
use crate::percolation::CellIndex;

pub type Rgb = [u8; 3];

pub const WHITE: Rgb = [255, 255, 255];
pub const BLACK: Rgb = [0, 0, 0];

/// Distinct colors for indexed overlays.
pub fn palette(i: usize) -> Rgb {
    const COLORS: [Rgb; 10] = [
        [230, 25, 75],
        [60, 180, 75],
        [0, 130, 200],
        [245, 130, 48],
        [145, 30, 180],
        [70, 240, 240],
        [240, 50, 230],
        [210, 245, 60],
        [0, 128, 128],
        [170, 110, 40],
    ];
    COLORS[i % COLORS.len()]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pixels: Vec<Rgb>,
}

impl Image {
    pub fn new(width: usize, height: usize, background: Rgb) -> Self {
        Image { width, height, pixels: vec![background; width * height] }
    }

    pub fn get(&self, x: usize, y: usize) -> Rgb {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, c: Rgb) {
        if x < self.width && y < self.height {
            self.pixels[y * self.width + x] = c;
        }
    }

    /// Fill the unit-square rectangle `[x0,x1] × [y0,y1]`.
    pub fn fill_unit_rect(&mut self, [x0, x1, y0, y1]: [f64; 4], c: Rgb) {
        let (w, h) = (self.width as f64, self.height as f64);
        let px0 = (x0 * w).floor().max(0.0) as usize;
        let px1 = ((x1 * w).ceil() as usize).min(self.width);
        let py0 = ((1.0 - y1) * h).floor().max(0.0) as usize;
        let py1 = (((1.0 - y0) * h).ceil() as usize).min(self.height);
        for py in py0..py1 {
            for px in px0..px1 {
                self.pixels[py * self.width + px] = c;
            }
        }
    }

    pub fn fill_cells<'a>(&mut self, cells: impl IntoIterator<Item = &'a CellIndex>, n: u32, dim: u8, c: Rgb) {
        for cell in cells {
            let mut b = cell.bounds(n);
            if dim == 1 {
                b[2] = 0.0;
                b[3] = 1.0;
            }
            self.fill_unit_rect(b, c);
        }
    }

    /// Draw a polyline in unit-square coordinates.
    pub fn draw_polyline(&mut self, pts: &[(f64, f64)], c: Rgb) {
        let (w, h) = (self.width as f64, self.height as f64);
        let to_px = |(x, y): (f64, f64)| (x * (w - 1.0), (1.0 - y) * (h - 1.0));
        for seg in pts.windows(2) {
            let (a, b) = (to_px(seg[0]), to_px(seg[1]));
            let steps = ((b.0 - a.0).abs().max((b.1 - a.1).abs()).ceil() as usize).max(1);
            for i in 0..=steps {
                let t = i as f64 / steps as f64;
                let x = (a.0 + t * (b.0 - a.0)).round();
                let y = (a.1 + t * (b.1 - a.1)).round();
                if x >= 0.0 && y >= 0.0 {
                    self.set(x as usize, y as usize, c);
                }
            }
        }
    }

    /// P6 encoding with one `#` comment line per entry of `comments`.
    pub fn to_ppm(&self, comments: &[String]) -> Vec<u8> {
        let mut out = b"P6\n".to_vec();
        for c in comments {
            for line in c.lines() {
                out.extend_from_slice(format!("# {line}\n").as_bytes());
            }
        }
        out.extend_from_slice(format!("{} {}\n255\n", self.width, self.height).as_bytes());
        for p in &self.pixels {
            out.extend_from_slice(p);
        }
        out
    }
}

/// Square image side for a grid with `side` cells per axis: at least
/// `min_px` pixels, and an integer number of pixels per cell.
pub fn image_side(side: u64, min_px: usize) -> usize {
    let side = side.max(1) as usize;
    side * min_px.div_ceil(side).max(1)
}

/// Occupied cells in black on white.
pub fn render_gridset(set: &GridSet, min_px: usize) -> Image {
    let px = image_side(set.side_count(), min_px);
    let height = if set.dim == 1 { (px / 8).max(1) } else { px };
    let mut img = Image::new(px, height, WHITE);
    img.fill_cells(set.cells(), set.n, set.dim, BLACK);
    img
}
