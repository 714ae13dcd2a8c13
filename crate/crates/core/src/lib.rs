pub mod codec;
pub mod cub;
pub mod fipp;
pub mod setfn;
pub mod sigma00;
pub mod streams;
