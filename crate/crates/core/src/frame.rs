//! Length-prefixed binary framing for the state stream.
//!
//! Every frame is `[payload length: u32 BE][type: u8][payload]`:
//!
//! | type | name  | payload                                              |
//! |------|-------|------------------------------------------------------|
//! | 0x01 | HELLO | version (0x01) ‖ r ‖ name length ‖ rule name (UTF-8) |
//! | 0x02 | STATE | index u64 BE ‖ minimal big-endian label bytes        |
//! | 0x03 | END   | empty                                                |
//! | 0x04 | ERROR | message (UTF-8)                                      |
//!
//! The label encoding is minimal: no leading zero bytes, and the label 0 is
//! zero bytes. Frame numbers in errors count from 0 at the HELLO frame, so
//! on a well-formed stream a STATE frame's number equals its index.

use std::io::{self, Read, Write};

use thiserror::Error;

use crate::label::Label;

/// Wire protocol version carried in HELLO.
pub const PROTOCOL_VERSION: u8 = 0x01;

/// Upper bound on a payload; anything larger is treated as a corrupt length
/// field rather than an allocation request.
pub const MAX_PAYLOAD: u32 = 1 << 20;

const TAG_HELLO: u8 = 0x01;
const TAG_STATE: u8 = 0x02;
const TAG_END: u8 = 0x03;
const TAG_ERROR: u8 = 0x04;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Frame {
    Hello {
        version: u8,
        arity_exponent: u8,
        rule_name: String,
    },
    State {
        index: u64,
        label: Label,
    },
    End,
    Error {
        message: String,
    },
}

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("i/o failure on the frame stream: {0}")]
    Io(#[from] io::Error),
    #[error("frame {frame}: stream ended inside the frame")]
    Truncated { frame: u64 },
    #[error("frame {frame}: payload length {len} exceeds the {MAX_PAYLOAD}-byte cap")]
    Oversized { frame: u64, len: u32 },
    #[error("frame {frame}: unknown frame type 0x{tag:02x}")]
    UnknownType { frame: u64, tag: u8 },
    #[error("frame {frame}: malformed HELLO ({reason})")]
    MalformedHello { frame: u64, reason: &'static str },
    #[error("frame {frame}: unsupported protocol version {version}")]
    UnsupportedVersion { frame: u64, version: u8 },
    #[error("frame {frame}: STATE payload shorter than an index")]
    MalformedState { frame: u64 },
    #[error("frame {frame}: expected HELLO to open the stream")]
    ExpectedHello { frame: u64 },
    #[error("frame {frame}: index gap (expected {expected}, got {got})")]
    IndexGap { frame: u64, expected: u64, got: u64 },
    #[error("frame {frame}: server reported an error: {message}")]
    ServerError { frame: u64, message: String },
    #[error("HELLO declares arity exponent 0, which admits no digit lengths; r >= 1 required")]
    ZeroArity,
}

impl Frame {
    fn tag(&self) -> u8 {
        match self {
            Frame::Hello { .. } => TAG_HELLO,
            Frame::State { .. } => TAG_STATE,
            Frame::End => TAG_END,
            Frame::Error { .. } => TAG_ERROR,
        }
    }

    fn payload(&self) -> Vec<u8> {
        match self {
            Frame::Hello {
                version,
                arity_exponent,
                rule_name,
            } => {
                let name = rule_name.as_bytes();
                assert!(
                    name.len() <= u8::MAX as usize,
                    "rule name longer than 255 bytes"
                );
                let mut p = Vec::with_capacity(3 + name.len());
                p.push(*version);
                p.push(*arity_exponent);
                p.push(name.len() as u8);
                p.extend_from_slice(name);
                p
            }
            Frame::State { index, label } => {
                let bytes = label.to_min_bytes_be();
                let mut p = Vec::with_capacity(8 + bytes.len());
                p.extend_from_slice(&index.to_be_bytes());
                p.extend_from_slice(&bytes);
                p
            }
            Frame::End => Vec::new(),
            Frame::Error { message } => message.as_bytes().to_vec(),
        }
    }

    /// Serializes the frame: length prefix, tag, payload.
    pub fn encode(&self) -> Vec<u8> {
        let payload = self.payload();
        let mut out = Vec::with_capacity(5 + payload.len());
        out.extend_from_slice(&(payload.len() as u32).to_be_bytes());
        out.push(self.tag());
        out.extend_from_slice(&payload);
        out
    }
}

/// Writes one frame to the transport.
pub fn write_frame(writer: &mut impl Write, frame: &Frame) -> io::Result<()> {
    writer.write_all(&frame.encode())
}

/// Reads one frame. `Ok(None)` means the stream ended cleanly at a frame
/// boundary; ends inside a frame are [`ProtocolError::Truncated`]. `frame`
/// is the 0-based position used in error messages.
pub fn read_frame(reader: &mut impl Read, frame: u64) -> Result<Option<Frame>, ProtocolError> {
    let mut len_bytes = [0u8; 4];
    // Probe a single byte so a clean end of stream is distinguishable from a
    // frame cut short.
    match reader.read(&mut len_bytes[..1])? {
        0 => return Ok(None),
        1 => {}
        n => unreachable!("read of 1 byte returned {n}"),
    }
    reader
        .read_exact(&mut len_bytes[1..])
        .map_err(|e| truncated_or_io(e, frame))?;
    let len = u32::from_be_bytes(len_bytes);
    if len > MAX_PAYLOAD {
        return Err(ProtocolError::Oversized { frame, len });
    }
    let mut tag = [0u8; 1];
    reader
        .read_exact(&mut tag)
        .map_err(|e| truncated_or_io(e, frame))?;
    let mut payload = vec![0u8; len as usize];
    reader
        .read_exact(&mut payload)
        .map_err(|e| truncated_or_io(e, frame))?;
    decode(tag[0], &payload, frame).map(Some)
}

fn truncated_or_io(e: io::Error, frame: u64) -> ProtocolError {
    if e.kind() == io::ErrorKind::UnexpectedEof {
        ProtocolError::Truncated { frame }
    } else {
        ProtocolError::Io(e)
    }
}

fn decode(tag: u8, payload: &[u8], frame: u64) -> Result<Frame, ProtocolError> {
    match tag {
        TAG_HELLO => {
            let [version, arity_exponent, name_len, name @ ..] = payload else {
                return Err(ProtocolError::MalformedHello {
                    frame,
                    reason: "payload shorter than the three fixed bytes",
                });
            };
            if *version != PROTOCOL_VERSION {
                return Err(ProtocolError::UnsupportedVersion {
                    frame,
                    version: *version,
                });
            }
            if name.len() != *name_len as usize {
                return Err(ProtocolError::MalformedHello {
                    frame,
                    reason: "name length byte disagrees with the payload",
                });
            }
            let rule_name = std::str::from_utf8(name)
                .map_err(|_| ProtocolError::MalformedHello {
                    frame,
                    reason: "rule name is not UTF-8",
                })?
                .to_string();
            Ok(Frame::Hello {
                version: *version,
                arity_exponent: *arity_exponent,
                rule_name,
            })
        }
        TAG_STATE => {
            if payload.len() < 8 {
                return Err(ProtocolError::MalformedState { frame });
            }
            let (index_bytes, label_bytes) = payload.split_at(8);
            let index = u64::from_be_bytes(index_bytes.try_into().expect("split at 8"));
            Ok(Frame::State {
                index,
                label: Label::from_bytes_be(label_bytes),
            })
        }
        TAG_END => Ok(Frame::End),
        TAG_ERROR => Ok(Frame::Error {
            message: String::from_utf8_lossy(payload).into_owned(),
        }),
        tag => Err(ProtocolError::UnknownType { frame, tag }),
    }
}
