//! The parsed, validated form of a DRAMml document.

use std::fmt;

/// A source location. Spans never participate in structural equality, so two
/// specs parsed from differently formatted text compare equal.
#[derive(Debug, Clone, Copy, Default)]
pub struct Span {
    pub line: u32,
    pub column: u32,
}

impl Span {
    pub fn new(line: u32, column: u32) -> Self {
        Self { line, column }
    }
}

impl PartialEq for Span {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

impl Eq for Span {}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArcKind {
    /// `place -> transition`
    PlaceToTransition,
    /// `transition -> place`
    TransitionToPlace,
    /// `place -o transition`
    Inhibitor,
    /// `place ->> transition`
    Reset,
    /// `transition -<> transition (param)`
    Timing,
}

impl ArcKind {
    pub fn operator(self) -> &'static str {
        match self {
            ArcKind::PlaceToTransition | ArcKind::TransitionToPlace => "->",
            ArcKind::Inhibitor => "-o",
            ArcKind::Reset => "->>",
            ArcKind::Timing => "-<>",
        }
    }
}

impl fmt::Display for ArcKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ArcKind::PlaceToTransition => "P2T",
            ArcKind::TransitionToPlace => "T2P",
            ArcKind::Inhibitor => "INHIBITOR",
            ArcKind::Reset => "RESET",
            ArcKind::Timing => "TIMING",
        };
        f.write_str(s)
    }
}

/// How the instances of the two endpoints of an arc are paired up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum ScopeQualifier {
    #[default]
    SameInstance,
    SiblingInstance,
    AllInstances,
}

impl ScopeQualifier {
    pub fn keyword(self) -> &'static str {
        match self {
            ScopeQualifier::SameInstance => "same",
            ScopeQualifier::SiblingInstance => "sibling",
            ScopeQualifier::AllInstances => "all",
        }
    }
}

/// The optional `@qualifier(level)` suffix of an arc.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scope {
    pub qualifier: ScopeQualifier,
    /// Hierarchy the qualifier applies to. `None` means the deepest hierarchy
    /// shared by both endpoints.
    pub level: Option<String>,
}

impl Scope {
    pub fn is_default(&self) -> bool {
        self.qualifier == ScopeQualifier::SameInstance && self.level.is_none()
    }

    /// Suffix used in property names and diff keys; empty for the default scope.
    pub fn tag(&self) -> String {
        if self.is_default() {
            return String::new();
        }
        match &self.level {
            Some(level) => format!("{}_{}", self.qualifier.keyword(), level),
            None => self.qualifier.keyword().to_string(),
        }
    }

    fn canonical(&self) -> (ScopeQualifier, Option<&String>) {
        (self.qualifier, self.level.as_ref())
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@{}", self.qualifier.keyword())?;
        if let Some(level) = &self.level {
            write!(f, "({level})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierarchyDecl {
    pub name: String,
    /// Configuration key holding the number of instances, e.g. `banks`.
    pub instance_count_param: String,
    pub children: Vec<HierarchyDecl>,
    pub span: Span,
}

/// Path of hierarchy names from the root; empty for root-level declarations.
pub type Owner = Vec<String>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceDecl {
    pub name: String,
    pub owner: Owner,
    pub capacity: u32,
    /// Timing parameter giving the token lifetime; timed places only.
    pub lifetime: Option<String>,
    pub initial_tokens: u32,
    pub span: Span,
}

impl PlaceDecl {
    pub fn is_timed(&self) -> bool {
        self.lifetime.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionDecl {
    pub name: String,
    pub owner: Owner,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcDecl {
    pub kind: ArcKind,
    pub from: String,
    pub to: String,
    pub timing_param: Option<String>,
    pub scope: Scope,
    pub span: Span,
}

impl ArcDecl {
    /// Identity of an arc within a spec; duplicates of this key are rejected.
    pub fn key(&self) -> (ArcKind, &str, &str, ScopeQualifier, Option<&String>) {
        let (q, l) = self.scope.canonical();
        (self.kind, &self.from, &self.to, q, l)
    }

    /// `(place, transition)` for arcs that touch a place.
    pub fn place_and_transition(&self) -> Option<(&str, &str)> {
        match self.kind {
            ArcKind::PlaceToTransition | ArcKind::Inhibitor | ArcKind::Reset => {
                Some((&self.from, &self.to))
            }
            ArcKind::TransitionToPlace => Some((&self.to, &self.from)),
            ArcKind::Timing => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimingParam {
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NetSpec {
    pub standard_name: String,
    pub hierarchies: Vec<HierarchyDecl>,
    pub places: Vec<PlaceDecl>,
    pub transitions: Vec<TransitionDecl>,
    pub arcs: Vec<ArcDecl>,
    pub timing_params: Vec<TimingParam>,
}

impl NetSpec {
    pub fn place(&self, name: &str) -> Option<&PlaceDecl> {
        self.places.iter().find(|p| p.name == name)
    }

    pub fn transition(&self, name: &str) -> Option<&TransitionDecl> {
        self.transitions.iter().find(|t| t.name == name)
    }

    /// Copy with every declaration list sorted, for order-insensitive
    /// comparison.
    pub fn canonical(&self) -> NetSpec {
        let mut spec = self.clone();
        fn sort_tree(h: &mut [HierarchyDecl]) {
            h.sort_by(|a, b| a.name.cmp(&b.name));
            for child in h.iter_mut() {
                sort_tree(&mut child.children);
            }
        }
        sort_tree(&mut spec.hierarchies);
        spec.places.sort_by(|a, b| a.name.cmp(&b.name));
        spec.transitions.sort_by(|a, b| a.name.cmp(&b.name));
        spec.arcs.sort_by(|a, b| a.key().cmp(&b.key()));
        spec.timing_params.sort_by(|a, b| a.name.cmp(&b.name));
        spec
    }

    /// Equality up to declaration order and source positions.
    pub fn structurally_eq(&self, other: &NetSpec) -> bool {
        self.canonical() == other.canonical()
    }
}
