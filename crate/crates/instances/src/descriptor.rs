use std::sync::Arc;

use amalgam_engine::Site;
use homology_solver::FiniteGroup;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::{InstanceError, RelSite, TowerSite};

/// `{kind, params}` as read from JSON or a short form such as `parity:4`,
/// `groupoid:S3` or `tower:Z8>Z4>Z2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiteDescriptor {
    pub kind: String,
    #[serde(default)]
    pub params: Value,
}

/// A built site, keeping the concrete type for callers that need it.
#[derive(Clone)]
pub enum SiteHandle {
    Rel(Arc<RelSite>),
    Tower(Arc<TowerSite>),
}

impl SiteHandle {
    pub fn site(&self) -> &dyn Site {
        match self {
            SiteHandle::Rel(s) => s.as_ref(),
            SiteHandle::Tower(s) => s.as_ref(),
        }
    }

    pub fn tower(&self) -> Option<&TowerSite> {
        match self {
            SiteHandle::Tower(t) => Some(t),
            SiteHandle::Rel(_) => None,
        }
    }

    pub fn rel(&self) -> Option<&RelSite> {
        match self {
            SiteHandle::Rel(r) => Some(r),
            SiteHandle::Tower(_) => None,
        }
    }
}

fn group_of(v: &Value) -> Result<FiniteGroup, InstanceError> {
    match v {
        Value::String(s) => FiniteGroup::by_name(s).ok_or_else(|| InstanceError::Descriptor(format!("unknown group {s}"))),
        Value::Object(o) if o.contains_key("table") => {
            let table: Vec<Vec<usize>> =
                serde_json::from_value(o["table"].clone()).map_err(|e| InstanceError::Descriptor(e.to_string()))?;
            let g = FiniteGroup { name: "G".into(), table };
            if !g.is_group() {
                return Err(InstanceError::Descriptor("table is not a group with identity 0".into()));
            }
            Ok(g)
        }
        _ => Err(InstanceError::Descriptor("group must be a name or {table}".into())),
    }
}

impl SiteDescriptor {
    pub fn parse(s: &str) -> Result<Self, InstanceError> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|e| InstanceError::Descriptor(e.to_string()));
        }
        let (kind, arg) = s.split_once(':').map_or((s, None), |(k, a)| (k, Some(a)));
        let params = match (kind, arg) {
            ("parity", a) => serde_json::json!({ "arity": a.map_or(Ok(4), str::parse::<usize>).map_err(|e| InstanceError::Descriptor(e.to_string()))? }),
            ("groupoid", Some(g)) => serde_json::json!({ "group": g }),
            ("tower", Some(t)) => serde_json::json!({ "levels": t.split('>').collect::<Vec<_>>() }),
            ("tetra" | "dlo", None) => Value::Null,
            _ => return Err(InstanceError::Descriptor(format!("cannot read site {s:?}"))),
        };
        Ok(SiteDescriptor { kind: kind.to_string(), params })
    }

    pub fn build(&self) -> Result<SiteHandle, InstanceError> {
        let p = &self.params;
        match self.kind.as_str() {
            "parity" => {
                let r = p.get("arity").and_then(Value::as_u64).unwrap_or(4) as usize;
                if r < 2 {
                    return Err(InstanceError::Descriptor("parity arity must be at least 2".into()));
                }
                Ok(SiteHandle::Rel(Arc::new(RelSite::parity(r))))
            }
            "tetra" => Ok(SiteHandle::Rel(Arc::new(RelSite::tetra()))),
            "dlo" => Ok(SiteHandle::Rel(Arc::new(RelSite::dlo()))),
            "groupoid" => {
                let g = group_of(p.get("group").or_else(|| p.get("table").map(|_| p)).ok_or_else(|| InstanceError::Descriptor("groupoid needs a group".into()))?)?;
                Ok(SiteHandle::Tower(Arc::new(TowerSite::groupoid(g))))
            }
            "tower" => {
                let levels: Vec<FiniteGroup> = p
                    .get("levels")
                    .and_then(Value::as_array)
                    .ok_or_else(|| InstanceError::Descriptor("tower needs levels".into()))?
                    .iter()
                    .map(group_of)
                    .collect::<Result<_, _>>()?;
                let maps: Vec<Vec<usize>> = match p.get("maps") {
                    Some(m) => serde_json::from_value(m.clone()).map_err(|e| InstanceError::Descriptor(e.to_string()))?,
                    None => levels
                        .windows(2)
                        .map(|w| {
                            if !(w[0].is_abelian() && w[1].is_abelian()) {
                                return Err(InstanceError::Descriptor("maps are only implied between cyclic levels".into()));
                            }
                            Ok((0..w[0].order()).map(|x| x % w[1].order()).collect())
                        })
                        .collect::<Result<_, _>>()?,
                };
                Ok(SiteHandle::Tower(Arc::new(TowerSite::tower(levels, maps)?)))
            }
            k => Err(InstanceError::Descriptor(format!("unknown site kind {k}"))),
        }
    }
}
