//! The server half of the client-server transformation: stream the states
//! of a rule system, one by one, in BFS order.

use std::io::Write;

use thiserror::Error;

use crate::frame::{write_frame, Frame, PROTOCOL_VERSION};
use crate::label::Label;
use crate::multiway::BfsEnumerator;
use crate::rule::{RuleError, RuleSystem};

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("transport write failed: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Rule(#[from] RuleError),
}

/// Streams HELLO, `count` STATE frames in BFS order from `root`, then END.
///
/// If the enumeration fails (a table rule running off its domain), an ERROR
/// frame is attempted before the error is returned, so the peer learns the
/// stream died rather than merely ended. A transport failure is returned
/// as-is; there is no channel left to apologize on.
pub fn serve<W: Write>(
    rule: &RuleSystem,
    root: Label,
    count: u64,
    writer: &mut W,
) -> Result<(), ServeError> {
    write_frame(
        writer,
        &Frame::Hello {
            version: PROTOCOL_VERSION,
            arity_exponent: rule.arity_exponent() as u8,
            rule_name: rule.name().to_string(),
        },
    )?;

    for item in BfsEnumerator::new(rule, root, count) {
        match item {
            Ok((index, label)) => {
                write_frame(writer, &Frame::State { index, label })?;
            }
            Err(rule_err) => {
                let report = Frame::Error {
                    message: rule_err.to_string(),
                };
                write_frame(writer, &report)?;
                writer.flush()?;
                return Err(rule_err.into());
            }
        }
    }

    write_frame(writer, &Frame::End)?;
    writer.flush()?;
    Ok(())
}

/// Does BFS enumeration from `root` walk the naturals `root, root+1, …`?
/// True exactly when the rule's client-server interpretation has the plain
/// successor map as its server rule.
pub fn derived_rule_check(rule: &RuleSystem, root: &Label, count: u64) -> Result<bool, RuleError> {
    let mut expected = root.value().clone();
    for item in BfsEnumerator::new(rule, root.clone(), count) {
        let (_, label) = item?;
        if *label.value() != expected {
            return Ok(false);
        }
        expected += 1u8;
    }
    Ok(true)
}
