use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use time::{Date, Month};

use super::AnalyticsError;

pub const SYMPTOM_NAMES: [&str; 12] = [
    "fever_or_chills",
    "cough",
    "shortness_of_breath",
    "fatigue",
    "muscle_aches",
    "headache",
    "loss_of_smell",
    "loss_of_taste",
    "sore_throat",
    "congestion",
    "nausea_or_vomiting",
    "diarrhea",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Symptoms {
    pub fever_or_chills: bool,
    pub cough: bool,
    pub shortness_of_breath: bool,
    pub fatigue: bool,
    pub muscle_aches: bool,
    pub headache: bool,
    pub loss_of_smell: bool,
    pub loss_of_taste: bool,
    pub sore_throat: bool,
    pub congestion: bool,
    pub nausea_or_vomiting: bool,
    pub diarrhea: bool,
}

impl Symptoms {
    /// Flags in [`SYMPTOM_NAMES`] order.
    pub fn flags(&self) -> [bool; 12] {
        [
            self.fever_or_chills,
            self.cough,
            self.shortness_of_breath,
            self.fatigue,
            self.muscle_aches,
            self.headache,
            self.loss_of_smell,
            self.loss_of_taste,
            self.sore_throat,
            self.congestion,
            self.nausea_or_vomiting,
            self.diarrhea,
        ]
    }

    pub fn from_flags(f: [bool; 12]) -> Self {
        Symptoms {
            fever_or_chills: f[0],
            cough: f[1],
            shortness_of_breath: f[2],
            fatigue: f[3],
            muscle_aches: f[4],
            headache: f[5],
            loss_of_smell: f[6],
            loss_of_taste: f[7],
            sore_throat: f[8],
            congestion: f[9],
            nausea_or_vomiting: f[10],
            diarrhea: f[11],
        }
    }

    pub fn count(&self) -> usize {
        self.flags().iter().filter(|&&b| b).count()
    }
}

/// Region code: 1 to 16 characters of `A-Z`, `0-9` or `-`, starting with a letter.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RegionCode(String);

impl RegionCode {
    pub const MAX_LEN: usize = 16;

    pub fn new(code: &str) -> Result<Self, AnalyticsError> {
        let ok = !code.is_empty()
            && code.len() <= Self::MAX_LEN
            && code.as_bytes()[0].is_ascii_uppercase()
            && code.bytes().all(|b| b.is_ascii_uppercase() || b.is_ascii_digit() || b == b'-');
        if ok {
            Ok(RegionCode(code.into()))
        } else {
            Err(AnalyticsError::InvalidRegion(code.into()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RegionCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for RegionCode {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for RegionCode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        RegionCode::new(&s).map_err(de::Error::custom)
    }
}

/// Calendar day, written `YYYY-MM-DD`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Day(pub Date);

impl Day {
    pub fn from_ymd(y: i32, m: u8, d: u8) -> Result<Self, AnalyticsError> {
        let month = Month::try_from(m).map_err(|_| AnalyticsError::InvalidDate)?;
        Date::from_calendar_date(y, month, d).map(Day).map_err(|_| AnalyticsError::InvalidDate)
    }

    pub fn parse(s: &str) -> Result<Self, AnalyticsError> {
        let b = s.as_bytes();
        if b.len() != 10 || b[4] != b'-' || b[7] != b'-' {
            return Err(AnalyticsError::InvalidDate);
        }
        let num = |r: core::ops::Range<usize>| -> Result<u32, AnalyticsError> {
            let part = &s[r];
            if !part.bytes().all(|c| c.is_ascii_digit()) {
                return Err(AnalyticsError::InvalidDate);
            }
            part.parse().map_err(|_| AnalyticsError::InvalidDate)
        };
        Day::from_ymd(num(0..4)? as i32, num(5..7)? as u8, num(8..10)? as u8)
    }

    pub fn next(self) -> Self {
        Day(self.0.next_day().expect("date in range"))
    }

    /// Whole days from `self` to `later`.
    pub fn days_until(self, later: Day) -> i64 {
        (later.0 - self.0).whole_days()
    }
}

impl fmt::Display for Day {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.0;
        write!(f, "{:04}-{:02}-{:02}", d.year(), u8::from(d.month()), d.day())
    }
}

impl Serialize for Day {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Day {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Day::parse(&s).map_err(de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TestResult {
    Positive,
    Negative,
    NA,
}

/// Anonymised record contributed with the holder's consent. Carries no
/// name or document number.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HealthRecord {
    pub symptoms: Symptoms,
    pub age: u16,
    pub geolocation: RegionCode,
    pub travel_history: Vec<RegionCode>,
    pub past_infections: u32,
    pub test_result: TestResult,
    pub demographic_group: String,
    #[serde(default)]
    pub vaccinated: bool,
    pub consent: bool,
    pub observed_at: Day,
}

impl HealthRecord {
    pub const MAX_AGE: u16 = 130;

    pub fn validate(&self) -> Result<(), AnalyticsError> {
        if self.age > Self::MAX_AGE {
            return Err(AnalyticsError::InvalidAge(self.age));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ingest {
    Stored,
    Discarded,
}

/// Consented records only.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RecordStore {
    records: Vec<HealthRecord>,
}

impl RecordStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn ingest(&mut self, record: HealthRecord) -> Result<Ingest, AnalyticsError> {
        record.validate()?;
        if !record.consent {
            return Ok(Ingest::Discarded);
        }
        self.records.push(record);
        Ok(Ingest::Stored)
    }

    pub fn records(&self) -> &[HealthRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Store holding the records that satisfy `keep`.
    pub fn filtered(&self, keep: impl Fn(&HealthRecord) -> bool) -> RecordStore {
        RecordStore { records: self.records.iter().filter(|r| keep(r)).cloned().collect() }
    }
}

/// Optional record filter for descriptive tables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordFilter {
    #[serde(default)]
    pub region: Option<RegionCode>,
    #[serde(default)]
    pub test_result: Option<TestResult>,
    #[serde(default)]
    pub demographic_group: Option<String>,
    #[serde(default)]
    pub from: Option<Day>,
    #[serde(default)]
    pub to: Option<Day>,
}

impl RecordFilter {
    pub fn matches(&self, r: &HealthRecord) -> bool {
        self.region.as_ref().is_none_or(|g| &r.geolocation == g)
            && self.test_result.is_none_or(|t| r.test_result == t)
            && self.demographic_group.as_ref().is_none_or(|g| &r.demographic_group == g)
            && self.from.is_none_or(|d| r.observed_at >= d)
            && self.to.is_none_or(|d| r.observed_at <= d)
    }
}
