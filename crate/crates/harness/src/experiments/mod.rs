pub mod crlb;
pub mod papr;
pub mod sensitivity;
pub mod sir;
