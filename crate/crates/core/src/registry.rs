//! The framework-API universe: type declarations and the member vocabulary.
//!
//! Every other stage resolves members against a [`Registry`] loaded from a JSON
//! file. The registry also fixes the vector dimension for query and call-sequence
//! vectors: each member occupies one slot of `api_vocab`, in file order, with a
//! field contributing a get slot immediately followed by a set slot.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Builtin type names understood without declaration.
pub const BUILTINS: [&str; 4] = ["int", "bool", "string", "void"];

/// Identifiers that may not be used as variable names in synthesized code.
pub const RESERVED_WORDS: [&str; 15] = [
    "class", "var", "if", "else", "while", "return", "new", "null", "true", "false", "default",
    "void", "int", "bool", "string",
];

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("cannot read registry file: {0}")]
    Io(#[from] std::io::Error),
    #[error("registry parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("duplicate type `{0}`")]
    DuplicateType(String),
    #[error("type `{0}` shadows a builtin")]
    BuiltinShadowed(String),
    #[error("duplicate member `{member}` in type `{ty}`")]
    DuplicateMember { ty: String, member: String },
    #[error("type `{ty}` member `{member}` references unknown type `{referenced}`")]
    UnknownTypeReference {
        ty: String,
        member: String,
        referenced: String,
    },
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("`void` has no default value")]
    VoidDefault,
}

/// Whether a type copies by value or by reference. `string` is the one
/// builtin reference type; `int` and `bool` are value types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TypeKind {
    Value,
    Reference,
}

/// The role a vocabulary entry plays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ApiKind {
    Method,
    FieldGet,
    FieldSet,
    Constructor,
}

/// A fully qualified framework member. Constructors are modeled as static
/// methods named `new` returning the declaring type; each field occupies both
/// a get and a set entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ApiRef {
    pub declaring_type: String,
    pub member: String,
    pub kind: ApiKind,
    pub arg_types: Vec<String>,
    pub return_type: String,
    pub is_static: bool,
}

impl ApiRef {
    /// The member rendered the way canonical call-sequence text spells it:
    /// `T.m(a,b)`, `new T(a)`, `get(T.f)` or `set(T.f)`.
    pub fn canonical(&self) -> String {
        match self.kind {
            ApiKind::Method => format!(
                "{}.{}({})",
                self.declaring_type,
                self.member,
                self.arg_types.join(",")
            ),
            ApiKind::Constructor => {
                format!("new {}({})", self.declaring_type, self.arg_types.join(","))
            }
            ApiKind::FieldGet => format!("get({}.{})", self.declaring_type, self.member),
            ApiKind::FieldSet => format!("set({}.{})", self.declaring_type, self.member),
        }
    }
}

impl fmt::Display for ApiRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

/// A method argument as declared: its type, and optionally the formal name
/// used when scaffolding a call to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ArgDecl {
    Typed {
        name: String,
        #[serde(rename = "type")]
        ty: String,
    },
    Bare(String),
}

impl ArgDecl {
    pub fn ty(&self) -> &str {
        match self {
            ArgDecl::Typed { ty, .. } => ty,
            ArgDecl::Bare(ty) => ty,
        }
    }

    pub fn formal_name(&self) -> Option<&str> {
        match self {
            ArgDecl::Typed { name, .. } => Some(name),
            ArgDecl::Bare(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodDecl {
    pub name: String,
    #[serde(default)]
    pub args: Vec<ArgDecl>,
    pub returns: String,
    #[serde(default)]
    pub r#static: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldDecl {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: String,
    #[serde(default)]
    pub r#static: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeDecl {
    pub name: String,
    pub kind: TypeKind,
    #[serde(default)]
    pub constructors: Vec<Vec<ArgDecl>>,
    #[serde(default)]
    pub methods: Vec<MethodDecl>,
    #[serde(default)]
    pub fields: Vec<FieldDecl>,
}

#[derive(Debug, Deserialize)]
struct RegistryFile {
    types: Vec<TypeDecl>,
}

/// The loaded API universe. Immutable after load; freely shareable.
#[derive(Debug, Clone)]
pub struct Registry {
    type_order: Vec<String>,
    types: HashMap<String, TypeDecl>,
    api_vocab: Vec<ApiRef>,
    vocab_index: HashMap<ApiRef, usize>,
}

impl Registry {
    pub fn load(path: impl AsRef<Path>) -> Result<Registry, RegistryError> {
        let text = std::fs::read_to_string(path)?;
        Registry::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Registry, RegistryError> {
        let file: RegistryFile = serde_json::from_str(text)?;
        Registry::from_types(file.types)
    }

    pub fn from_types(decls: Vec<TypeDecl>) -> Result<Registry, RegistryError> {
        let mut type_order = Vec::with_capacity(decls.len());
        let mut types = HashMap::new();
        for decl in decls {
            if BUILTINS.contains(&decl.name.as_str()) {
                return Err(RegistryError::BuiltinShadowed(decl.name));
            }
            if types.contains_key(&decl.name) {
                return Err(RegistryError::DuplicateType(decl.name));
            }
            type_order.push(decl.name.clone());
            types.insert(decl.name.clone(), decl);
        }

        let api_vocab = build_vocab(&type_order, &types)?;
        let vocab_index = api_vocab
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, a)| (a, i))
            .collect();
        Ok(Registry {
            type_order,
            types,
            api_vocab,
            vocab_index,
        })
    }
    // (member name, arg-type list) pairs must be unique within a type;
    // a field's get/set pair counts as one member.
    pub fn api_vocab(&self) -> &[ApiRef] {
        &self.api_vocab
    }

    /// Declared type names in file order.
    pub fn type_names(&self) -> impl Iterator<Item = &str> {
        self.type_order.iter().map(String::as_str)
    }

    /// Vector dimension: one slot per vocabulary entry.
    pub fn vocab_len(&self) -> usize {
        self.api_vocab.len()
    }

    pub fn vocab_index_of(&self, api: &ApiRef) -> Option<usize> {
        self.vocab_index.get(api).copied()
    }

    pub fn type_decl(&self, name: &str) -> Option<&TypeDecl> {
        self.types.get(name)
    }

    pub fn has_type(&self, name: &str) -> bool {
        self.types.contains_key(name)
    }

    pub fn is_builtin(name: &str) -> bool {
        BUILTINS.contains(&name)
    }

    /// Reference types copy by handle and default to `null`; everything else
    /// copies by value. `string` is the one builtin reference type.
    pub fn is_reference_type(&self, name: &str) -> bool {
        match name {
            "string" => true,
            "int" | "bool" | "void" => false,
            other => self
                .types
                .get(other)
                .map(|t| t.kind == TypeKind::Reference)
                .unwrap_or(false),
        }
    }

    /// Looks up the unique member matching `(type, member, arg_types)`. For a
    /// field the get entry is returned; use [`Registry::resolve_field_set`]
    /// for the assignment side. Returns `None` rather than fabricating a member.
    pub fn resolve_member(&self, ty: &str, member: &str, arg_types: &[&str]) -> Option<&ApiRef> {
        let decl = self.types.get(ty)?;
        if member == "new" {
            return self.lookup(ty, "new", ApiKind::Constructor, arg_types);
        }
        if let Some(api) = self.lookup(ty, member, ApiKind::Method, arg_types) {
            return Some(api);
        }
        if arg_types.is_empty() && decl.fields.iter().any(|f| f.name == member) {
            return self.lookup(ty, member, ApiKind::FieldGet, &[]);
        }
        None
    }

    pub fn resolve_field_get(&self, ty: &str, field: &str) -> Option<&ApiRef> {
        self.lookup(ty, field, ApiKind::FieldGet, &[])
    }

    pub fn resolve_field_set(&self, ty: &str, field: &str) -> Option<&ApiRef> {
        self.lookup(ty, field, ApiKind::FieldSet, &[])
    }

    fn lookup(&self, ty: &str, member: &str, kind: ApiKind, arg_types: &[&str]) -> Option<&ApiRef> {
        self.api_vocab.iter().find(|a| {
            a.declaring_type == ty
                && a.member == member
                && a.kind == kind
                && a.arg_types.len() == arg_types.len()
                && a.arg_types.iter().zip(arg_types).all(|(a, b)| a == b)
        })
    }

    /// Methods of `ty` with the given name, any signature.
    pub fn methods_named<'a>(
        &'a self,
        ty: &'a str,
        member: &'a str,
    ) -> impl Iterator<Item = &'a ApiRef> {
        self.api_vocab.iter().filter(move |a| {
            a.declaring_type == ty && a.member == member && a.kind == ApiKind::Method
        })
    }

    pub fn constructors_of<'a>(&'a self, ty: &'a str) -> impl Iterator<Item = &'a ApiRef> {
        self.api_vocab
            .iter()
            .filter(move |a| a.declaring_type == ty && a.kind == ApiKind::Constructor)
    }

    /// The declared formal name of argument `index` of `api`, when the
    /// registry file supplied one.
    pub fn formal_arg_name(&self, api: &ApiRef, index: usize) -> Option<&str> {
        let decl = self.types.get(&api.declaring_type)?;
        match api.kind {
            ApiKind::Constructor => decl
                .constructors
                .iter()
                .find(|c| {
                    c.len() == api.arg_types.len()
                        && c.iter().zip(&api.arg_types).all(|(a, t)| a.ty() == t)
                })
                .and_then(|c| c.get(index))
                .and_then(|a| a.formal_name()),
            ApiKind::Method => decl
                .methods
                .iter()
                .find(|m| {
                    m.name == api.member
                        && m.args.len() == api.arg_types.len()
                        && m.args.iter().zip(&api.arg_types).all(|(a, t)| a.ty() == t)
                })
                .and_then(|m| m.args.get(index))
                .and_then(|a| a.formal_name()),
            _ => None,
        }
    }

    /// Source text for the default value of a type: `null` for reference
    /// types, `0` for int, `false` for bool, `default(T)` for other value types.
    pub fn default_literal(&self, ty: &str) -> Result<String, RegistryError> {
        match ty {
            "int" => Ok("0".into()),
            "bool" => Ok("false".into()),
            "string" => Ok("null".into()),
            "void" => Err(RegistryError::VoidDefault),
            other => match self.types.get(other) {
                Some(decl) if decl.kind == TypeKind::Reference => Ok("null".into()),
                Some(_) => Ok(format!("default({other})")),
                None => Err(RegistryError::UnknownType(other.to_string())),
            },
        }
    }
}

fn build_vocab(
    type_order: &[String],
    types: &HashMap<String, TypeDecl>,
) -> Result<Vec<ApiRef>, RegistryError> {
    let check_type_ref = |ty: &str, member: &str, referenced: &str| {
        if BUILTINS.contains(&referenced) || types.contains_key(referenced) {
            Ok(())
        } else {
            Err(RegistryError::UnknownTypeReference {
                ty: ty.to_string(),
                member: member.to_string(),
                referenced: referenced.to_string(),
            })
        }
    };

    let mut vocab = Vec::new();
    for name in type_order {
        let decl = &types[name];
        // (member name, arg-type list) pairs must be unique within a type;
        // a field's get/set pair counts as one member.
        let mut seen: Vec<(String, Vec<String>)> = Vec::new();
        let mut claim = |member: &str, args: &[String]| -> Result<(), RegistryError> {
            let key = (member.to_string(), args.to_vec());
            if seen.contains(&key) {
                return Err(RegistryError::DuplicateMember {
                    ty: name.clone(),
                    member: member.to_string(),
                });
            }
            seen.push(key);
            Ok(())
        };

        for ctor in &decl.constructors {
            let arg_types: Vec<String> = ctor.iter().map(|a| a.ty().to_string()).collect();
            claim("new", &arg_types)?;
            for a in &arg_types {
                check_type_ref(name, "new", a)?;
            }
            vocab.push(ApiRef {
                declaring_type: name.clone(),
                member: "new".into(),
                kind: ApiKind::Constructor,
                arg_types,
                return_type: name.clone(),
                is_static: true,
            });
        }
        for m in &decl.methods {
            let arg_types: Vec<String> = m.args.iter().map(|a| a.ty().to_string()).collect();
            claim(&m.name, &arg_types)?;
            for a in &arg_types {
                check_type_ref(name, &m.name, a)?;
            }
            check_type_ref(name, &m.name, &m.returns)?;
            vocab.push(ApiRef {
                declaring_type: name.clone(),
                member: m.name.clone(),
                kind: ApiKind::Method,
                arg_types,
                return_type: m.returns.clone(),
                is_static: m.r#static,
            });
        }
        for f in &decl.fields {
            claim(&f.name, &[])?;
            check_type_ref(name, &f.name, &f.ty)?;
            for kind in [ApiKind::FieldGet, ApiKind::FieldSet] {
                vocab.push(ApiRef {
                    declaring_type: name.clone(),
                    member: f.name.clone(),
                    kind,
                    arg_types: Vec::new(),
                    return_type: f.ty.clone(),
                    is_static: f.r#static,
                });
            }
        }
    }
    Ok(vocab)
}
