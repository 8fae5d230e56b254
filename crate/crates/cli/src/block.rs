use std::fmt::Write;

use selfsim::io::RunConfig;

/// Ordered `key: value` lines. Config entries come first, prefixed
/// `config.`, so a block alone reproduces its run.
#[derive(Default)]
pub struct Block {
    lines: Vec<(String, String)>,
}

impl Block {
    pub fn new(config: &RunConfig) -> Self {
        let mut b = Block::default();
        for (k, v) in config.entries() {
            if k == "command" {
                b.put(k, v);
            } else {
                b.put(format!("config.{k}"), v);
            }
        }
        b
    }

    pub fn put(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.lines.push((key.into(), value.to_string().replace('\n', " ")));
        self
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.lines {
            writeln!(s, "{k}: {v}").expect("string write");
        }
        s
    }
}

/// Shortest round-trip form of an `f64`.
pub fn f(x: f64) -> String {
    format!("{x}")
}
