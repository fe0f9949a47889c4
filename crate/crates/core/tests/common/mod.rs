pub mod oracle;
pub mod gen;
pub mod natural;
