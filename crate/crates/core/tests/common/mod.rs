#![allow(dead_code)]

pub mod enumerate;
pub mod gen;
pub mod instances;
pub mod laws;
pub mod near_miss;
pub mod oracle;
