use std::fmt;

/// How a metric is tested against its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    AtMost,
    Below,
    AtLeast,
    Above,
}

impl Bound {
    fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Bound::AtMost => value <= threshold,
            Bound::Below => value < threshold,
            Bound::AtLeast => value >= threshold,
            Bound::Above => value > threshold,
        }
    }
}

/// One `name metric value threshold PASS|FAIL` line.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportLine {
    pub name: String,
    pub metric: String,
    pub value: f64,
    pub threshold: f64,
    pub bound: Bound,
}

impl ReportLine {
    pub fn new(name: impl Into<String>, metric: impl Into<String>, value: f64, bound: Bound, threshold: f64) -> Self {
        Self {
            name: name.into(),
            metric: metric.into(),
            value,
            threshold,
            bound,
        }
    }

    /// A non-finite value always fails.
    pub fn passed(&self) -> bool {
        self.value.is_finite() && self.bound.holds(self.value, self.threshold)
    }
}

impl fmt::Display for ReportLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {:.6e} {:.6e} {}",
            self.name,
            self.metric,
            self.value,
            self.threshold,
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

/// Line-oriented validation output; comments start with `#`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub header: Vec<String>,
    pub lines: Vec<ReportLine>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            header: vec![title.into()],
            ..Default::default()
        }
    }

    pub fn push(&mut self, line: ReportLine) {
        self.lines.push(line);
    }

    pub fn extend(&mut self, lines: impl IntoIterator<Item = ReportLine>) {
        self.lines.extend(lines);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn all_passed(&self) -> bool {
        self.lines.iter().all(ReportLine::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportLine> {
        self.lines.iter().filter(|l| !l.passed())
    }

    pub fn find(&self, name: &str, metric: &str) -> Option<&ReportLine> {
        self.lines.iter().find(|l| l.name == name && l.metric == metric)
    }

    /// Process exit code: 0 iff every line passed.
    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for h in &self.header {
            writeln!(f, "# {h}")?;
        }
        for l in &self.lines {
            writeln!(f, "{l}")?;
        }
        for n in &self.notes {
            for row in n.lines() {
                writeln!(f, "# {row}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lines_are_parseable() {
        let l = ReportLine::new("tv_n2_p0.4", "tv", 0.001, Bound::AtMost, 0.005);
        let s = l.to_string();
        let f: Vec<&str> = s.split_whitespace().collect();
        assert_eq!(f.len(), 5);
        assert_eq!(f[0], "tv_n2_p0.4");
        assert_eq!(f[2].parse::<f64>().unwrap(), 0.001);
        assert_eq!(f[4], "PASS");
    }

    #[test]
    fn nan_fails_and_sets_exit_code() {
        let mut r = ValidationReport::new("t");
        r.push(ReportLine::new("a", "m", 1.0, Bound::Below, 2.0));
        assert_eq!(r.exit_code(), 0);
        r.push(ReportLine::new("b", "m", f64::NAN, Bound::AtLeast, 0.0));
        assert_eq!(r.exit_code(), 1);
        assert_eq!(r.failures().count(), 1);
    }
}
