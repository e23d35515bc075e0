use crate::error::{Error, Result};
use crate::lattice::{Vertex, VertexSet, Window};

/// A ±1 field on a window, optionally with the real values it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    window: Window,
    signs: Vec<i8>,
    values: Option<Vec<f64>>,
}

impl Configuration {
    pub fn new(window: Window, signs: Vec<i8>) -> Result<Self> {
        if signs.len() != window.len() {
            return Err(Error::param(format!(
                "{} signs for a window of {} vertices",
                signs.len(),
                window.len()
            )));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::param("signs must be ±1"));
        }
        Ok(Configuration {
            window,
            signs,
            values: None,
        })
    }

    pub fn constant(window: Window, sign: i8) -> Self {
        Configuration {
            window,
            signs: vec![sign; window.len()],
            values: None,
        }
    }

    pub fn from_fn(window: Window, mut f: impl FnMut(Vertex) -> i8) -> Self {
        let signs = window
            .vertices()
            .map(|v| if f(v) > 0 { 1 } else { -1 })
            .collect();
        Configuration {
            window,
            signs,
            values: None,
        }
    }

    /// Signs of `values`; ties (exact zeros) map to -1.
    pub fn from_values(window: Window, values: Vec<f64>) -> Result<(Self, usize)> {
        if values.len() != window.len() {
            return Err(Error::param("value vector does not match window"));
        }
        let mut ties = 0;
        let signs = values
            .iter()
            .map(|&x| {
                if x == 0.0 {
                    ties += 1;
                }
                if x > 0.0 {
                    1
                } else {
                    -1
                }
            })
            .collect();
        Ok((
            Configuration {
                window,
                signs,
                values: Some(values),
            },
            ties,
        ))
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    /// Sign at `v`, or 0 outside the window.
    #[inline]
    pub fn sign(&self, v: Vertex) -> i8 {
        self.window.index(v).map_or(0, |i| self.signs[i])
    }

    #[inline]
    pub fn sign_at(&self, idx: usize) -> i8 {
        self.signs[idx]
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn values(&self) -> Option<&[f64]> {
        self.values.as_deref()
    }

    pub fn set(&mut self, v: Vertex, sign: i8) {
        if let Some(i) = self.window.index(v) {
            self.signs[i] = if sign > 0 { 1 } else { -1 };
        }
    }

    pub fn negated(&self) -> Self {
        Configuration {
            window: self.window,
            signs: self.signs.iter().map(|s| -s).collect(),
            values: self.values.as_ref().map(|v| v.iter().map(|x| -x).collect()),
        }
    }

    /// Restriction to a sub-window.
    pub fn crop(&self, window: &Window) -> Result<Self> {
        if !self.window.contains_window(window) {
            return Err(Error::OutsideWindow(format!("{window:?}")));
        }
        let signs = window
            .vertices()
            .map(|v| self.signs[self.window.index_unchecked(v)])
            .collect();
        let values = self.values.as_ref().map(|vals| {
            window
                .vertices()
                .map(|v| vals[self.window.index_unchecked(v)])
                .collect()
        });
        Ok(Configuration {
            window: *window,
            signs,
            values,
        })
    }

    pub fn covers(&self, window: &Window) -> bool {
        self.window.contains_window(window)
    }

    /// Vertices carrying `sign`.
    pub fn sign_set(&self, sign: i8) -> VertexSet {
        let mut s = VertexSet::empty(self.window);
        for (i, &x) in self.signs.iter().enumerate() {
            if x == sign {
                s.insert(self.window.vertex(i));
            }
        }
        s
    }
}
