#![allow(dead_code)]

pub mod svg;
