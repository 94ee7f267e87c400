//! Canonical text encoding used for everything that gets signed or hashed.
//!
//! Struct and map fields are sorted by name and written as `name=value`,
//! joined with `|`. Nested maps are wrapped in `{}`, sequences in `[]` with
//! `,` separators, enum variants carrying data as `Variant(...)`, and `None`
//! as `~`. Structural characters inside leaf values are backslash-escaped so
//! the encoding is injective.

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::{Display, Write};

use serde::ser::{self, Serialize};

#[derive(Debug, thiserror::Error)]
#[error("canonical encoding failed: {0}")]
pub struct CanonicalError(String);

impl ser::Error for CanonicalError {
    fn custom<T: Display>(msg: T) -> Self {
        CanonicalError(msg.to_string())
    }
}

/// Encode `value` canonically. The top level of a struct or map is written
/// without surrounding braces.
pub fn to_canonical<T: Serialize + ?Sized>(value: &T) -> String {
    let node = value.serialize(NodeSerializer).expect("canonical encoding of a well-formed value");
    let mut out = String::new();
    match node {
        Node::Map(entries) => write_entries(&mut out, entries),
        other => write_node(&mut out, other),
    }
    out
}

/// Canonical encoding as UTF-8 bytes.
pub fn to_canonical_bytes<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    to_canonical(value).into_bytes()
}

enum Node {
    Leaf(String),
    None,
    Seq(Vec<Node>),
    Map(Vec<(String, Node)>),
    Variant(&'static str, Box<Node>),
}

const SPECIAL: &[char] = &['\\', '|', '=', ',', '[', ']', '{', '}', '(', ')', '~'];

fn escape_into(out: &mut String, raw: &str) {
    for ch in raw.chars() {
        if SPECIAL.contains(&ch) {
            out.push('\\');
        }
        out.push(ch);
    }
}

fn write_entries(out: &mut String, mut entries: Vec<(String, Node)>) {
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    for (i, (key, value)) in entries.into_iter().enumerate() {
        if i > 0 {
            out.push('|');
        }
        escape_into(out, &key);
        out.push('=');
        write_node(out, value);
    }
}

fn write_node(out: &mut String, node: Node) {
    match node {
        Node::Leaf(s) => escape_into(out, &s),
        Node::None => out.push('~'),
        Node::Seq(items) => {
            out.push('[');
            for (i, item) in items.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_node(out, item);
            }
            out.push(']');
        }
        Node::Map(entries) => {
            out.push('{');
            write_entries(out, entries);
            out.push('}');
        }
        Node::Variant(name, inner) => {
            out.push_str(name);
            out.push('(');
            write_node(out, *inner);
            out.push(')');
        }
    }
}

fn leaf<T: Display>(v: T) -> Result<Node, CanonicalError> {
    let mut s = String::new();
    write!(s, "{v}").map_err(|_| CanonicalError("fmt".to_owned()))?;
    Ok(Node::Leaf(s))
}

struct NodeSerializer;

impl ser::Serializer for NodeSerializer {
    type Ok = Node;
    type Error = CanonicalError;
    type SerializeSeq = SeqBuilder;
    type SerializeTuple = SeqBuilder;
    type SerializeTupleStruct = SeqBuilder;
    type SerializeTupleVariant = VariantSeqBuilder;
    type SerializeMap = MapBuilder;
    type SerializeStruct = MapBuilder;
    type SerializeStructVariant = VariantMapBuilder;

    fn serialize_bool(self, v: bool) -> Result<Node, CanonicalError> {
        leaf(v)
    }
    fn serialize_i8(self, v: i8) -> Result<Node, CanonicalError> {
        leaf(v)
    }
    fn serialize_i16(self, v: i16) -> Result<Node, CanonicalError> {
        leaf(v)
    }
    fn serialize_i32(self, v: i32) -> Result<Node, CanonicalError> {
        leaf(v)
    }
    fn serialize_i64(self, v: i64) -> Result<Node, CanonicalError> {
        leaf(v)
    }
    fn serialize_u8(self, v: u8) -> Result<Node, CanonicalError> {
        leaf(v)
    }
    fn serialize_u16(self, v: u16) -> Result<Node, CanonicalError> {
        leaf(v)
    }
    fn serialize_u32(self, v: u32) -> Result<Node, CanonicalError> {
        leaf(v)
    }
    fn serialize_u64(self, v: u64) -> Result<Node, CanonicalError> {
        leaf(v)
    }
    fn serialize_f32(self, v: f32) -> Result<Node, CanonicalError> {
        leaf(v)
    }
    fn serialize_f64(self, v: f64) -> Result<Node, CanonicalError> {
        leaf(v)
    }
    fn serialize_char(self, v: char) -> Result<Node, CanonicalError> {
        leaf(v)
    }
    fn serialize_str(self, v: &str) -> Result<Node, CanonicalError> {
        Ok(Node::Leaf(v.to_owned()))
    }
    fn serialize_bytes(self, v: &[u8]) -> Result<Node, CanonicalError> {
        Ok(Node::Leaf(hex::encode(v)))
    }
    fn serialize_none(self) -> Result<Node, CanonicalError> {
        Ok(Node::None)
    }
    fn serialize_some<T: Serialize + ?Sized>(self, value: &T) -> Result<Node, CanonicalError> {
        value.serialize(self)
    }
    fn serialize_unit(self) -> Result<Node, CanonicalError> {
        Ok(Node::Leaf(String::new()))
    }
    fn serialize_unit_struct(self, _name: &'static str) -> Result<Node, CanonicalError> {
        Ok(Node::Leaf(String::new()))
    }
    fn serialize_unit_variant(
        self,
        _name: &'static str,
        _index: u32,
        variant: &'static str,
    ) -> Result<Node, CanonicalError> {
        Ok(Node::Leaf(variant.to_owned()))
    }
    fn serialize_newtype_struct<T: Serialize + ?Sized>(
        self,
        _name: &'static str,
        value: &T,
    ) -> Result<Node, CanonicalError> {
        value.serialize(self)
    }
    fn serialize_newtype_variant<T: Serialize + ?Sized>(
        self,
        _name: &'static str,
        _index: u32,
        variant: &'static str,
        value: &T,
    ) -> Result<Node, CanonicalError> {
        Ok(Node::Variant(variant, Box::new(value.serialize(self)?)))
    }
    fn serialize_seq(self, len: Option<usize>) -> Result<SeqBuilder, CanonicalError> {
        Ok(SeqBuilder(Vec::with_capacity(len.unwrap_or(0))))
    }
    fn serialize_tuple(self, len: usize) -> Result<SeqBuilder, CanonicalError> {
        Ok(SeqBuilder(Vec::with_capacity(len)))
    }
    fn serialize_tuple_struct(self, _name: &'static str, len: usize) -> Result<SeqBuilder, CanonicalError> {
        Ok(SeqBuilder(Vec::with_capacity(len)))
    }
    fn serialize_tuple_variant(
        self,
        _name: &'static str,
        _index: u32,
        variant: &'static str,
        len: usize,
    ) -> Result<VariantSeqBuilder, CanonicalError> {
        Ok(VariantSeqBuilder(variant, Vec::with_capacity(len)))
    }
    fn serialize_map(self, len: Option<usize>) -> Result<MapBuilder, CanonicalError> {
        Ok(MapBuilder { entries: Vec::with_capacity(len.unwrap_or(0)), next_key: None })
    }
    fn serialize_struct(self, _name: &'static str, len: usize) -> Result<MapBuilder, CanonicalError> {
        self.serialize_map(Some(len))
    }
    fn serialize_struct_variant(
        self,
        _name: &'static str,
        _index: u32,
        variant: &'static str,
        len: usize,
    ) -> Result<VariantMapBuilder, CanonicalError> {
        Ok(VariantMapBuilder(variant, Vec::with_capacity(len)))
    }
}

struct SeqBuilder(Vec<Node>);

impl ser::SerializeSeq for SeqBuilder {
    type Ok = Node;
    type Error = CanonicalError;
    fn serialize_element<T: Serialize + ?Sized>(&mut self, value: &T) -> Result<(), CanonicalError> {
        self.0.push(value.serialize(NodeSerializer)?);
        Ok(())
    }
    fn end(self) -> Result<Node, CanonicalError> {
        Ok(Node::Seq(self.0))
    }
}

impl ser::SerializeTuple for SeqBuilder {
    type Ok = Node;
    type Error = CanonicalError;
    fn serialize_element<T: Serialize + ?Sized>(&mut self, value: &T) -> Result<(), CanonicalError> {
        ser::SerializeSeq::serialize_element(self, value)
    }
    fn end(self) -> Result<Node, CanonicalError> {
        ser::SerializeSeq::end(self)
    }
}

impl ser::SerializeTupleStruct for SeqBuilder {
    type Ok = Node;
    type Error = CanonicalError;
    fn serialize_field<T: Serialize + ?Sized>(&mut self, value: &T) -> Result<(), CanonicalError> {
        ser::SerializeSeq::serialize_element(self, value)
    }
    fn end(self) -> Result<Node, CanonicalError> {
        ser::SerializeSeq::end(self)
    }
}

struct VariantSeqBuilder(&'static str, Vec<Node>);

impl ser::SerializeTupleVariant for VariantSeqBuilder {
    type Ok = Node;
    type Error = CanonicalError;
    fn serialize_field<T: Serialize + ?Sized>(&mut self, value: &T) -> Result<(), CanonicalError> {
        self.1.push(value.serialize(NodeSerializer)?);
        Ok(())
    }
    fn end(self) -> Result<Node, CanonicalError> {
        Ok(Node::Variant(self.0, Box::new(Node::Seq(self.1))))
    }
}

struct MapBuilder {
    entries: Vec<(String, Node)>,
    next_key: Option<String>,
}

fn key_string(node: Node) -> Result<String, CanonicalError> {
    match node {
        Node::Leaf(s) => Ok(s),
        _ => Err(CanonicalError("map keys must be scalar".to_owned())),
    }
}

impl ser::SerializeMap for MapBuilder {
    type Ok = Node;
    type Error = CanonicalError;
    fn serialize_key<T: Serialize + ?Sized>(&mut self, key: &T) -> Result<(), CanonicalError> {
        self.next_key = Some(key_string(key.serialize(NodeSerializer)?)?);
        Ok(())
    }
    fn serialize_value<T: Serialize + ?Sized>(&mut self, value: &T) -> Result<(), CanonicalError> {
        let key = self.next_key.take().ok_or_else(|| CanonicalError("value without key".to_owned()))?;
        self.entries.push((key, value.serialize(NodeSerializer)?));
        Ok(())
    }
    fn end(self) -> Result<Node, CanonicalError> {
        Ok(Node::Map(self.entries))
    }
}

impl ser::SerializeStruct for MapBuilder {
    type Ok = Node;
    type Error = CanonicalError;
    fn serialize_field<T: Serialize + ?Sized>(&mut self, key: &'static str, value: &T) -> Result<(), CanonicalError> {
        self.entries.push((key.to_owned(), value.serialize(NodeSerializer)?));
        Ok(())
    }
    fn end(self) -> Result<Node, CanonicalError> {
        Ok(Node::Map(self.entries))
    }
}

struct VariantMapBuilder(&'static str, Vec<(String, Node)>);

impl ser::SerializeStructVariant for VariantMapBuilder {
    type Ok = Node;
    type Error = CanonicalError;
    fn serialize_field<T: Serialize + ?Sized>(&mut self, key: &'static str, value: &T) -> Result<(), CanonicalError> {
        self.1.push((key.to_owned(), value.serialize(NodeSerializer)?));
        Ok(())
    }
    fn end(self) -> Result<Node, CanonicalError> {
        Ok(Node::Variant(self.0, Box::new(Node::Map(self.1))))
    }
}
