//! Abstract syntax of policies: entities, role names, roles and the five
//! credential forms, plus policy-level validation.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Returns true if `c` may appear after the first character of an identifier.
pub(crate) fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn charset_ok(name: &str) -> bool {
    name.chars().skip(1).all(is_ident_continue)
}

/// A principal. Names start with an uppercase letter.
///
/// Construction does not check the lexical rule; the parser enforces it and
/// [`validate`] reports violations for programmatically built policies.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Entity(Arc<str>);

impl Entity {
    pub fn new(name: impl Into<Arc<str>>) -> Self {
        Self(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_well_formed(&self) -> bool {
        self.0.chars().next().is_some_and(|c| c.is_ascii_uppercase()) && charset_ok(&self.0)
    }
}

impl fmt::Display for Entity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Entity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Entity({})", self.0)
    }
}

impl From<&str> for Entity {
    fn from(value: &str) -> Self {
        Self::new(value)
    }
}

/// The name part of a role. Starts with a lowercase letter.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoleName(Arc<str>);

impl RoleName {
    pub fn new(name: impl Into<Arc<str>>) -> Self {
        Self(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_well_formed(&self) -> bool {
        self.0.chars().next().is_some_and(|c| c.is_ascii_lowercase()) && charset_ok(&self.0)
    }
}

impl fmt::Display for RoleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for RoleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RoleName({})", self.0)
    }
}

impl From<&str> for RoleName {
    fn from(value: &str) -> Self {
        Self::new(value)
    }
}

/// `owner.name`
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Role {
    pub owner: Entity,
    pub name: RoleName,
}

impl Role {
    pub fn new(owner: impl Into<Entity>, name: impl Into<RoleName>) -> Self {
        Self { owner: owner.into(), name: name.into() }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.owner, self.name)
    }
}

impl fmt::Debug for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Role({self})")
    }
}

/// The right-hand side of a credential.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Body {
    /// `A.r <- D`
    SimpleMember { member: Entity },
    /// `A.r <- B.r1`
    SimpleInclusion { source: Role },
    /// `A.r <- A.r1.r2`; `first.owner` must be the head owner.
    LinkingInclusion { first: Role, second: RoleName },
    /// `A.r <- B1.r1 & B2.r2`
    IntersectionInclusion { left: Role, right: Role },
    /// `A.r <- B1.r1 - B2.r2`: members of `include` that are not members of `exclude`.
    Exclusion { include: Role, exclude: Role },
}

impl Body {
    /// Roles the body refers to directly, in source order.
    pub fn roles(&self) -> Vec<&Role> {
        match self {
            Body::SimpleMember { .. } => vec![],
            Body::SimpleInclusion { source } => vec![source],
            Body::LinkingInclusion { first, .. } => vec![first],
            Body::IntersectionInclusion { left, right } => vec![left, right],
            Body::Exclusion { include, exclude } => vec![include, exclude],
        }
    }
}

impl fmt::Display for Body {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Body::SimpleMember { member } => write!(f, "{member}"),
            Body::SimpleInclusion { source } => write!(f, "{source}"),
            Body::LinkingInclusion { first, second } => write!(f, "{first}.{second}"),
            Body::IntersectionInclusion { left, right } => write!(f, "{left} & {right}"),
            Body::Exclusion { include, exclude } => write!(f, "{include} - {exclude}"),
        }
    }
}

/// One policy statement `head <- body`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Credential {
    pub head: Role,
    pub body: Body,
}

impl Credential {
    pub fn new(head: Role, body: Body) -> Self {
        Self { head, body }
    }

    pub fn member(head: Role, member: impl Into<Entity>) -> Self {
        Self::new(head, Body::SimpleMember { member: member.into() })
    }

    pub fn inclusion(head: Role, source: Role) -> Self {
        Self::new(head, Body::SimpleInclusion { source })
    }

    /// Linking inclusion `head <- head.owner.first.second`.
    pub fn linking(head: Role, first: impl Into<RoleName>, second: impl Into<RoleName>) -> Self {
        let first = Role { owner: head.owner.clone(), name: first.into() };
        Self::new(head, Body::LinkingInclusion { first, second: second.into() })
    }

    pub fn intersection(head: Role, left: Role, right: Role) -> Self {
        Self::new(head, Body::IntersectionInclusion { left, right })
    }

    pub fn exclusion(head: Role, include: Role, exclude: Role) -> Self {
        Self::new(head, Body::Exclusion { include, exclude })
    }

    pub fn is_exclusion(&self) -> bool {
        matches!(self.body, Body::Exclusion { .. })
    }

    /// Every entity mentioned by the credential.
    pub fn entities(&self) -> Vec<&Entity> {
        let mut out = vec![&self.head.owner];
        match &self.body {
            Body::SimpleMember { member } => out.push(member),
            body => out.extend(body.roles().into_iter().map(|r| &r.owner)),
        }
        out
    }

    /// Every role name mentioned by the credential.
    pub fn role_names(&self) -> Vec<&RoleName> {
        let mut out = vec![&self.head.name];
        out.extend(self.body.roles().into_iter().map(|r| &r.name));
        if let Body::LinkingInclusion { second, .. } = &self.body {
            out.push(second);
        }
        out
    }
}

impl fmt::Display for Credential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <- {}", self.head, self.body)
    }
}

/// A finite set of credentials together with the symbols they mention.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Policy {
    credentials: BTreeSet<Credential>,
    universe: BTreeSet<Entity>,
    role_names: BTreeSet<RoleName>,
}

impl Policy {
    pub fn new(credentials: impl IntoIterator<Item = Credential>) -> Self {
        let credentials: BTreeSet<Credential> = credentials.into_iter().collect();
        let mut universe = BTreeSet::new();
        let mut role_names = BTreeSet::new();
        for cred in &credentials {
            universe.extend(cred.entities().into_iter().cloned());
            role_names.extend(cred.role_names().into_iter().cloned());
        }
        Self { credentials, universe, role_names }
    }

    pub fn credentials(&self) -> &BTreeSet<Credential> {
        &self.credentials
    }

    /// The entities occurring anywhere in the policy.
    pub fn universe(&self) -> &BTreeSet<Entity> {
        &self.universe
    }

    pub fn role_names(&self) -> &BTreeSet<RoleName> {
        &self.role_names
    }

    pub fn len(&self) -> usize {
        self.credentials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.credentials.is_empty()
    }

    /// Roles that head at least one credential.
    pub fn defined_roles(&self) -> BTreeSet<Role> {
        self.credentials.iter().map(|c| c.head.clone()).collect()
    }

    /// The definition of `role`: every credential whose head is `role`.
    pub fn definition_of(&self, role: &Role) -> BTreeSet<Credential> {
        definition_of(self, role)
    }

    /// Union of two policies.
    pub fn merge(&self, other: &Policy) -> Policy {
        Policy::new(self.credentials.iter().chain(other.credentials.iter()).cloned())
    }
}

impl FromIterator<Credential> for Policy {
    fn from_iter<T: IntoIterator<Item = Credential>>(iter: T) -> Self {
        Policy::new(iter)
    }
}

pub fn definition_of(policy: &Policy, role: &Role) -> BTreeSet<Credential> {
    // Credentials are ordered by head first, so the definition is a contiguous range.
    policy.credentials.iter().skip_while(|c| &c.head < role).take_while(|c| &c.head == role).cloned().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum DiagnosticKind {
    EntityCase,
    RoleNameCase,
    LinkingOwner,
}

/// One well-formedness violation found by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Diagnostic {
    /// Canonical text of the offending credential.
    pub credential: String,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.credential, self.message)
    }
}

/// Checks lexical rules and the linking-owner rule. Diagnostics come back
/// sorted by credential text.
pub fn validate(policy: &Policy) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for cred in &policy.credentials {
        let text = cred.to_string();
        let mut seen_entities = BTreeSet::new();
        for entity in cred.entities() {
            if !entity.is_well_formed() && seen_entities.insert(entity) {
                out.push(Diagnostic {
                    credential: text.clone(),
                    kind: DiagnosticKind::EntityCase,
                    message: format!(
                        "entity `{entity}` must start with an uppercase letter and contain only ASCII letters, digits or `_`"
                    ),
                });
            }
        }
        let mut seen_names = BTreeSet::new();
        for name in cred.role_names() {
            if !name.is_well_formed() && seen_names.insert(name) {
                out.push(Diagnostic {
                    credential: text.clone(),
                    kind: DiagnosticKind::RoleNameCase,
                    message: format!(
                        "role name `{name}` must start with a lowercase letter and contain only ASCII letters, digits or `_`"
                    ),
                });
            }
        }
        if let Body::LinkingInclusion { first, .. } = &cred.body {
            if first.owner != cred.head.owner {
                out.push(Diagnostic {
                    credential: text.clone(),
                    kind: DiagnosticKind::LinkingOwner,
                    message: format!(
                        "linked role must be owned by the head owner `{}`, found `{}`",
                        cred.head.owner, first.owner
                    ),
                });
            }
        }
    }
    out.sort();
    out
}
