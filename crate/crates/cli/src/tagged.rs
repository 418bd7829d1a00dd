//! Internally tagged enums that keep field paths in deserialization errors.
//!
//! serde's derived `#[serde(tag = "kind")]` buffers the variant body, which hides
//! everything below the enum from `serde_path_to_error`. `tagged_enum!` keeps the
//! derived `Serialize` but deserializes each variant body separately, carrying the
//! inner path out inside the error message (see [`split_path`]).

use serde::de::{DeserializeOwned, Error};
use serde_json::{Map, Value};

const MARK: char = '\u{1}';

/// Joins `outer` (`.` for the root) with a path relative to it.
pub fn join_path(outer: &str, inner: &str) -> String {
    match (outer, inner) {
        (".", _) => inner.to_string(),
        (_, ".") => outer.to_string(),
        _ if inner.starts_with('[') => format!("{outer}{inner}"),
        _ => format!("{outer}.{inner}"),
    }
}

/// Splits a message produced by [`body`] into its inner path and the message proper.
pub fn split_path(message: &str) -> (Option<&str>, &str) {
    message
        .strip_prefix(MARK)
        .and_then(|rest| rest.split_once(MARK))
        .map_or((None, message), |(path, msg)| (Some(path), msg))
}

/// Deserializes a variant body, recording where inside it an error occurred.
pub fn body<T: DeserializeOwned, E: Error>(map: Map<String, Value>) -> Result<T, E> {
    serde_path_to_error::deserialize(Value::Object(map)).map_err(|e| {
        let outer = e.path().to_string();
        let message = e.into_inner().to_string();
        let (deeper, rest) = split_path(&message);
        let path = deeper.map_or(outer.clone(), |d| join_path(&outer, d));
        E::custom(format!("{MARK}{path}{MARK}{rest}"))
    })
}

/// Removes and returns the `kind` tag.
pub fn take_kind<E: Error>(map: &mut Map<String, Value>) -> Result<String, E> {
    match map.remove("kind") {
        Some(Value::String(s)) => Ok(s),
        Some(_) => Err(E::custom("`kind` must be a string")),
        None => Err(E::missing_field("kind")),
    }
}

macro_rules! tagged_enum {
    (
        $(#[$meta:meta])*
        pub enum $name:ident {
            $(
                $(#[$vmeta:meta])*
                $variant:ident = $tag:literal $({
                    $( $(#[$fmeta:meta])* $field:ident : $fty:ty ),* $(,)?
                })?
            ),* $(,)?
        }
    ) => {
        $(#[$meta])*
        #[derive(serde::Serialize)]
        #[serde(tag = "kind")]
        pub enum $name {
            $(
                $(#[$vmeta])*
                #[serde(rename = $tag)]
                $variant $({ $( $(#[$fmeta])* $field: $fty ),* })?
            ),*
        }

        impl<'de> serde::Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                #[allow(non_snake_case)]
                mod bodies {
                    #[allow(unused_imports)]
                    use super::*;
                    $(
                        #[derive(serde::Deserialize)]
                        #[serde(deny_unknown_fields)]
                        pub struct $variant { $($( $(#[$fmeta])* pub $field: $fty ),*)? }
                    )*
                }
                use serde::de::Error as _;
                let mut map = <serde_json::Map<String, serde_json::Value> as serde::Deserialize>::deserialize(d)?;
                let kind = $crate::tagged::take_kind::<D::Error>(&mut map)?;
                match kind.as_str() {
                    $(
                        $tag => {
                            #[allow(unused_variables)]
                            let b: bodies::$variant = $crate::tagged::body(map)?;
                            Ok($name::$variant $({ $( $field: b.$field ),* })?)
                        }
                    )*
                    other => Err(D::Error::unknown_variant(other, &[$($tag),*])),
                }
            }
        }
    };
}

pub(crate) use tagged_enum;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paths_join_and_split() {
        assert_eq!(join_path(".", "a[0]"), "a[0]");
        assert_eq!(join_path("a", "[2].b"), "a[2].b");
        assert_eq!(join_path("a", "b"), "a.b");
        let msg = format!("{MARK}x.y{MARK}bad number");
        assert_eq!(split_path(&msg), (Some("x.y"), "bad number"));
        assert_eq!(split_path("plain"), (None, "plain"));
    }
}
