//! Bit-stable JSON output: keys in insertion order, floats with 17
//! significant digits.

/// A float with 17 significant digits, or `null` when not finite.
pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

fn string(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

/// A JSON object assembled field by field.
#[derive(Debug, Default, Clone)]
pub struct Object {
    fields: Vec<(String, String)>,
}

impl Object {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn float(mut self, key: &str, v: f64) -> Self {
        self.fields.push((key.to_string(), float(v)));
        self
    }

    pub fn int(mut self, key: &str, v: u64) -> Self {
        self.fields.push((key.to_string(), v.to_string()));
        self
    }

    pub fn str(mut self, key: &str, v: &str) -> Self {
        self.fields.push((key.to_string(), string(v)));
        self
    }

    pub fn null(mut self, key: &str) -> Self {
        self.fields.push((key.to_string(), "null".to_string()));
        self
    }

    pub fn object(mut self, key: &str, v: Object) -> Self {
        self.fields.push((key.to_string(), v.render()));
        self
    }

    pub fn raw(mut self, key: &str, json: String) -> Self {
        self.fields.push((key.to_string(), json));
        self
    }

    pub fn render(&self) -> String {
        let body: Vec<String> = self
            .fields
            .iter()
            .map(|(k, v)| format!("{}:{v}", string(k)))
            .collect();
        format!("{{{}}}", body.join(","))
    }
}

/// A JSON array of already-rendered values.
pub fn array(items: impl IntoIterator<Item = String>) -> String {
    format!("[{}]", items.into_iter().collect::<Vec<_>>().join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        assert_eq!(float(0.1), "1.0000000000000001e-1");
        assert_eq!(float(0.0), "0.0000000000000000e0");
        assert_eq!(float(f64::NAN), "null");
        for x in [1.0 / 3.0, 123456.789, 1e-300, 6.02e23] {
            let back: f64 = float(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits());
        }
    }

    #[test]
    fn objects_keep_key_order() {
        let o = Object::new().int("b", 1).str("a", "x\"y").float("c", 0.5).null("d");
        assert_eq!(o.render(), r#"{"b":1,"a":"x\"y","c":5.0000000000000000e-1,"d":null}"#);
        let v: serde_json::Value = serde_json::from_str(&o.render()).unwrap();
        assert_eq!(v["c"], 0.5);
        assert_eq!(array(["1".to_string(), "2".to_string()]), "[1,2]");
    }
}
