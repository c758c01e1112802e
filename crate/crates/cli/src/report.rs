//! Flat JSON reports with numbers at 17 significant digits.

use mahler::io::fmt_num;

#[derive(Default)]
pub struct Report {
    fields: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num(&mut self, key: &str, x: f64) -> &mut Self {
        let v = if x.is_finite() { fmt_num(x) } else { "null".into() };
        self.fields.push((key.into(), v));
        self
    }

    pub fn int(&mut self, key: &str, x: impl Into<i64>) -> &mut Self {
        self.fields.push((key.into(), x.into().to_string()));
        self
    }

    pub fn flag(&mut self, key: &str, b: bool) -> &mut Self {
        self.fields.push((key.into(), b.to_string()));
        self
    }

    pub fn text(&mut self, key: &str, s: &str) -> &mut Self {
        self.fields.push((key.into(), format!("{s:?}")));
        self
    }

    pub fn list(&mut self, key: &str, xs: &[f64]) -> &mut Self {
        let items: Vec<String> = xs.iter().map(|&x| fmt_num(x)).collect();
        self.fields.push((key.into(), format!("[{}]", items.join(", "))));
        self
    }

    pub fn render(&self) -> String {
        let body: Vec<String> = self
            .fields
            .iter()
            .map(|(k, v)| format!("  \"{k}\": {v}"))
            .collect();
        format!("{{\n{}\n}}\n", body.join(",\n"))
    }
}
