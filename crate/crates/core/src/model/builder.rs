//! Programmatic instance construction.

use super::{Instance, RawClass, RawInstance, RawRatio, RawWeight, ValidationError};
use num_rational::Rational64;

/// Fluent builder producing a [`RawInstance`] and validating it into an
/// [`Instance`]. Quotas left unset fall back to the defaults (platform:
/// neighborhood size, item: 1).
#[derive(Clone, Debug, Default)]
pub struct InstanceBuilder {
    raw: RawInstance,
}

impl InstanceBuilder {
    pub fn new() -> Self {
        InstanceBuilder {
            raw: RawInstance {
                items: Vec::new(),
                platforms: Vec::new(),
                edges: Vec::new(),
                platform_quota: Default::default(),
                item_quota: Default::default(),
                platform_classes: Vec::new(),
                item_classes: Vec::new(),
                edge_weight: None,
            },
        }
    }

    pub fn items<I: IntoIterator<Item = S>, S: Into<String>>(mut self, names: I) -> Self {
        self.raw.items.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn platforms<I: IntoIterator<Item = S>, S: Into<String>>(mut self, names: I) -> Self {
        self.raw.platforms.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn edge(mut self, item: impl Into<String>, platform: impl Into<String>) -> Self {
        self.raw.edges.push((item.into(), platform.into()));
        self
    }

    pub fn platform_quota(mut self, platform: impl Into<String>, quota: u64) -> Self {
        self.raw.platform_quota.insert(platform.into(), quota as i64);
        self
    }

    pub fn item_quota(mut self, item: impl Into<String>, quota: u64) -> Self {
        self.raw.item_quota.insert(item.into(), quota as i64);
        self
    }

    pub fn platform_class(
        mut self,
        id: impl Into<String>,
        owner: impl Into<String>,
        members: impl IntoIterator<Item = (String, String)>,
        quota: u64,
    ) -> Self {
        self.raw.platform_classes.push(RawClass {
            id: id.into(),
            owner: owner.into(),
            members: members.into_iter().collect(),
            quota: quota as i64,
        });
        self
    }

    pub fn item_class(
        mut self,
        id: impl Into<String>,
        owner: impl Into<String>,
        members: impl IntoIterator<Item = (String, String)>,
        quota: u64,
    ) -> Self {
        self.raw.item_classes.push(RawClass {
            id: id.into(),
            owner: owner.into(),
            members: members.into_iter().collect(),
            quota: quota as i64,
        });
        self
    }

    pub fn weight(
        mut self,
        item: impl Into<String>,
        platform: impl Into<String>,
        weight: Rational64,
    ) -> Self {
        self.raw.edge_weight.get_or_insert_with(Vec::new).push(RawWeight {
            edge: (item.into(), platform.into()),
            weight: RawRatio::from_rational(weight),
        });
        self
    }

    pub fn raw(self) -> RawInstance {
        self.raw
    }

    pub fn build(self) -> Result<Instance, ValidationError> {
        Instance::from_raw(&self.raw)
    }
}
