//! The four observation-steering policies under comparison. They share
//! every other subsystem; routing only decides which command the mount
//! and the fuselage receive.

use core::fmt;
use core::str::FromStr;

/// Who aims where: the planned direction or the velocity direction, via
/// the rotatable mount or fuselage yaw.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Paradigm {
    /// Multi-objective aim through the rotatable mount; yaw stays put.
    AsaaRotatable,
    /// Mount follows the velocity direction; yaw stays put.
    VelocityRotatable,
    /// Mount locked forward; yaw follows the multi-objective aim.
    MultiObjYaw,
    /// Mount locked forward; yaw follows the velocity direction.
    VelocityYaw,
}

pub const ALL_PARADIGMS: [Paradigm; 4] = [
    Paradigm::AsaaRotatable,
    Paradigm::VelocityRotatable,
    Paradigm::MultiObjYaw,
    Paradigm::VelocityYaw,
];

impl Paradigm {
    pub fn name(&self) -> &'static str {
        match self {
            Paradigm::AsaaRotatable => "asaa_rotatable",
            Paradigm::VelocityRotatable => "velocity_rotatable",
            Paradigm::MultiObjYaw => "multiobj_yaw",
            Paradigm::VelocityYaw => "velocity_yaw",
        }
    }
}

impl fmt::Display for Paradigm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnknownParadigm(pub alloc::string::String);

impl fmt::Display for UnknownParadigm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown paradigm \"{}\" (expected one of", self.0)?;
        for (i, p) in ALL_PARADIGMS.iter().enumerate() {
            write!(f, "{} {}", if i == 0 { "" } else { "," }, p.name())?;
        }
        write!(f, ")")
    }
}

#[cfg(feature = "std")]
impl std::error::Error for UnknownParadigm {}

impl FromStr for Paradigm {
    type Err = UnknownParadigm;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ALL_PARADIGMS
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| UnknownParadigm(alloc::string::String::from(s)))
    }
}

/// Raw aim orders before slew limiting. `mount` is body-relative, `yaw`
/// a world heading.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AimCommand {
    pub mount: f64,
    pub yaw: f64,
}

impl Default for AimCommand {
    fn default() -> Self {
        AimCommand { mount: 0.0, yaw: 0.0 }
    }
}

/// Routes the shared planner outputs into mount and yaw commands.
/// `head_plan` and `vel_dir` are world headings; `yaw` is the current
/// fuselage heading. While hovering (`vel_dir` absent) the
/// velocity-following paradigms hold their previous command.
pub fn route_paradigm(
    paradigm: Paradigm,
    head_plan: f64,
    vel_dir: Option<f64>,
    yaw: f64,
    prev: &AimCommand,
) -> AimCommand {
    match paradigm {
        Paradigm::AsaaRotatable => AimCommand { mount: head_plan - yaw, yaw: 0.0 },
        Paradigm::VelocityRotatable => AimCommand {
            mount: vel_dir.map_or(prev.mount, |d| d - yaw),
            yaw: 0.0,
        },
        Paradigm::MultiObjYaw => AimCommand { mount: 0.0, yaw: head_plan },
        Paradigm::VelocityYaw => AimCommand {
            mount: 0.0,
            yaw: vel_dir.unwrap_or(prev.yaw),
        },
    }
}
