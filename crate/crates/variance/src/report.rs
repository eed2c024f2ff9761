use std::fmt;

/// Column header of [`VarianceReport::csv_row`].
pub const REPORT_HEADER: &str = "statistic,method,value,err,meta";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Mc,
    Quadrature,
    ClosedForm,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Mc => "mc",
            Method::Quadrature => "quadrature",
            Method::ClosedForm => "closed_form",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A variance value with its provenance.
///
/// `err` is the quadrature error estimate for [`Method::Quadrature`] and the
/// jackknife standard error for [`Method::Mc`].
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceReport {
    pub statistic: String,
    pub method: Method,
    pub value: f64,
    pub err: f64,
    pub n_samples: Option<usize>,
    pub meta: Vec<(String, String)>,
}

impl VarianceReport {
    pub(crate) fn quadrature(statistic: String, value: f64, err: f64) -> Self {
        VarianceReport {
            statistic,
            method: Method::Quadrature,
            value: value.max(0.0),
            err,
            n_samples: None,
            meta: Vec::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// `statistic,method,value,err,key=value,...`.
    pub fn csv_row(&self) -> String {
        let mut row = format!(
            "{},{},{:.12e},{:.6e}",
            self.statistic, self.method, self.value, self.err
        );
        if let Some(n) = self.n_samples {
            row.push_str(&format!(",n={n}"));
        }
        for (k, v) in &self.meta {
            row.push_str(&format!(",{k}={v}"));
        }
        row
    }
}
