use std::io::{self, Write};

use super::value::Value;

/// Where program output goes.
pub enum Sink {
    Stdout(io::BufWriter<io::Stdout>),
    Capture(String),
}

/// Mutable state of one evaluation: references, self cells and output.
pub struct Store {
    refs: Vec<Value>,
    cells: Vec<Option<Value>>,
    premature_reads: u64,
    sink: Sink,
}

impl Store {
    pub fn new(sink: Sink) -> Store {
        Store {
            refs: Vec::new(),
            cells: Vec::new(),
            premature_reads: 0,
            sink,
        }
    }

    pub fn stdout() -> Store {
        Store::new(Sink::Stdout(io::BufWriter::new(io::stdout())))
    }

    pub fn capture() -> Store {
        Store::new(Sink::Capture(String::new()))
    }

    pub fn new_ref(&mut self, v: Value) -> usize {
        self.refs.push(v);
        self.refs.len() - 1
    }

    pub fn read_ref(&self, r: usize) -> Option<&Value> {
        self.refs.get(r)
    }

    pub fn write_ref(&mut self, r: usize, v: Value) -> bool {
        match self.refs.get_mut(r) {
            Some(slot) => {
                *slot = v;
                true
            }
            None => false,
        }
    }

    pub fn new_cell(&mut self) -> usize {
        self.cells.push(None);
        self.cells.len() - 1
    }

    /// The object in the cell, or `None` while it is still being built.
    /// Failed reads are counted.
    pub fn read_cell(&mut self, c: usize) -> Option<Value> {
        let v = self.cells.get(c).cloned().flatten();
        if v.is_none() {
            self.premature_reads += 1;
        }
        v
    }

    pub fn fill_cell(&mut self, c: usize, v: Value) {
        self.cells[c] = Some(v);
    }

    /// Reads of self cells that were not yet filled.
    pub fn premature_reads(&self) -> u64 {
        self.premature_reads
    }

    pub fn write(&mut self, s: &str) {
        match &mut self.sink {
            Sink::Stdout(w) => {
                let _ = w.write_all(s.as_bytes());
            }
            Sink::Capture(buf) => buf.push_str(s),
        }
    }

    pub fn flush(&mut self) {
        if let Sink::Stdout(w) = &mut self.sink {
            let _ = w.flush();
        }
    }

    /// Captured output so far; empty when writing to standard output.
    pub fn output(&self) -> &str {
        match &self.sink {
            Sink::Capture(buf) => buf,
            Sink::Stdout(_) => "",
        }
    }

    pub fn take_output(&mut self) -> String {
        match &mut self.sink {
            Sink::Capture(buf) => std::mem::take(buf),
            Sink::Stdout(_) => String::new(),
        }
    }
}

impl Drop for Store {
    fn drop(&mut self) {
        self.flush();
    }
}
