//! The 17 canonical facial landmarks and their JSON serialization.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use nalgebra::Point3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::RigidTransform;

/// The canonical anatomical landmark names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LandmarkName {
    RightEyeOuterCorner,
    RightEyeInnerCorner,
    LeftEyeInnerCorner,
    LeftEyeOuterCorner,
    RightLipCorner,
    LeftLipCorner,
    NoseTip,
    Nasion,
    RightAlare,
    LeftAlare,
    LipCenter,
    UpperLip,
    LowerLip,
    Subnasale,
    Pogonion,
    RightEarlobeTip,
    LeftEarlobeTip,
}

impl LandmarkName {
    pub const ALL: [LandmarkName; 17] = [
        LandmarkName::RightEyeOuterCorner,
        LandmarkName::RightEyeInnerCorner,
        LandmarkName::LeftEyeInnerCorner,
        LandmarkName::LeftEyeOuterCorner,
        LandmarkName::RightLipCorner,
        LandmarkName::LeftLipCorner,
        LandmarkName::NoseTip,
        LandmarkName::Nasion,
        LandmarkName::RightAlare,
        LandmarkName::LeftAlare,
        LandmarkName::LipCenter,
        LandmarkName::UpperLip,
        LandmarkName::LowerLip,
        LandmarkName::Subnasale,
        LandmarkName::Pogonion,
        LandmarkName::RightEarlobeTip,
        LandmarkName::LeftEarlobeTip,
    ];

    /// The six most salient landmarks, detected by the PCA stage.
    pub const SALIENT: [LandmarkName; 6] = [
        LandmarkName::RightEyeOuterCorner,
        LandmarkName::RightEyeInnerCorner,
        LandmarkName::LeftEyeInnerCorner,
        LandmarkName::LeftEyeOuterCorner,
        LandmarkName::RightLipCorner,
        LandmarkName::LeftLipCorner,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            LandmarkName::RightEyeOuterCorner => "Right Eye Outer Corner",
            LandmarkName::RightEyeInnerCorner => "Right Eye Inner Corner",
            LandmarkName::LeftEyeInnerCorner => "Left Eye Inner Corner",
            LandmarkName::LeftEyeOuterCorner => "Left Eye Outer Corner",
            LandmarkName::RightLipCorner => "Right Lip Corner",
            LandmarkName::LeftLipCorner => "Left Lip Corner",
            LandmarkName::NoseTip => "Nose Tip",
            LandmarkName::Nasion => "Nasion",
            LandmarkName::RightAlare => "Right Alare",
            LandmarkName::LeftAlare => "Left Alare",
            LandmarkName::LipCenter => "Lip Center",
            LandmarkName::UpperLip => "Upper Lip",
            LandmarkName::LowerLip => "Lower Lip",
            LandmarkName::Subnasale => "Subnasale",
            LandmarkName::Pogonion => "Pogonion",
            LandmarkName::RightEarlobeTip => "Right Earlobe tip",
            LandmarkName::LeftEarlobeTip => "Left Earlobe tip",
        }
    }

    pub fn from_label(label: &str) -> Option<LandmarkName> {
        LandmarkName::ALL.iter().copied().find(|n| n.label() == label)
    }
}

impl fmt::Display for LandmarkName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A named set of 3D landmark points, keys a subset of the 17 canonical names.
///
/// Backed by a `BTreeMap` so iteration and serialization order are stable.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LandmarkSet {
    points: BTreeMap<LandmarkName, Point3<f64>>,
    /// Landmarks flagged low-confidence by a heuristic detector.
    low_confidence: BTreeMap<LandmarkName, bool>,
}

impl LandmarkSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: LandmarkName, p: Point3<f64>) -> Result<()> {
        if !p.coords.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "landmark {name} has non-finite coordinates"
            )));
        }
        self.points.insert(name, p);
        Ok(())
    }

    pub fn set_low_confidence(&mut self, name: LandmarkName, flag: bool) {
        self.low_confidence.insert(name, flag);
    }

    pub fn is_low_confidence(&self, name: LandmarkName) -> bool {
        self.low_confidence.get(&name).copied().unwrap_or(false)
    }

    pub fn get(&self, name: LandmarkName) -> Option<Point3<f64>> {
        self.points.get(&name).copied()
    }

    pub fn contains(&self, name: LandmarkName) -> bool {
        self.points.contains_key(&name)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// True iff all 17 canonical landmarks are present.
    pub fn is_complete(&self) -> bool {
        LandmarkName::ALL.iter().all(|n| self.contains(*n))
    }

    pub fn iter(&self) -> impl Iterator<Item = (LandmarkName, Point3<f64>)> + '_ {
        self.points.iter().map(|(n, p)| (*n, *p))
    }

    pub fn names(&self) -> impl Iterator<Item = LandmarkName> + '_ {
        self.points.keys().copied()
    }

    pub fn transformed(&self, t: &RigidTransform) -> LandmarkSet {
        LandmarkSet {
            points: self.points.iter().map(|(n, p)| (*n, t.apply(p))).collect(),
            low_confidence: self.low_confidence.clone(),
        }
    }

    pub fn merged(&self, other: &LandmarkSet) -> LandmarkSet {
        let mut out = self.clone();
        for (n, p) in other.iter() {
            out.points.insert(n, p);
        }
        for (n, f) in &other.low_confidence {
            out.low_confidence.insert(*n, *f);
        }
        out
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let file: LandmarkFile = self.into();
        let text = serde_json::to_string_pretty(&file)
            .map_err(|e| Error::Config(format!("landmark serialization: {e}")))?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load_json(path: &Path) -> Result<LandmarkSet> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: LandmarkFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.into(),
            element: "landmark json".into(),
            message: e.to_string(),
        })?;
        file.into_set(path)
    }
}

/// On-disk schema: `{"landmarks": {"Nose Tip": [x,y,z], ...}, "units": "mm"}`.
#[derive(Serialize, Deserialize)]
struct LandmarkFile {
    landmarks: BTreeMap<String, [f64; 3]>,
    units: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    low_confidence: BTreeMap<String, bool>,
}

impl From<&LandmarkSet> for LandmarkFile {
    fn from(set: &LandmarkSet) -> Self {
        LandmarkFile {
            landmarks: set
                .points
                .iter()
                .map(|(n, p)| (n.label().to_string(), [p.x, p.y, p.z]))
                .collect(),
            units: "mm".into(),
            low_confidence: set
                .low_confidence
                .iter()
                .filter(|(_, f)| **f)
                .map(|(n, f)| (n.label().to_string(), *f))
                .collect(),
        }
    }
}

impl LandmarkFile {
    fn into_set(self, path: &Path) -> Result<LandmarkSet> {
        let mut set = LandmarkSet::new();
        for (label, coords) in self.landmarks {
            let name = LandmarkName::from_label(&label).ok_or_else(|| Error::Parse {
                path: path.into(),
                element: label.clone(),
                message: "unknown landmark name".into(),
            })?;
            set.insert(name, Point3::new(coords[0], coords[1], coords[2]))?;
        }
        for (label, flag) in self.low_confidence {
            if let Some(name) = LandmarkName::from_label(&label) {
                set.set_low_confidence(name, flag);
            }
        }
        Ok(set)
    }
}
