pub mod rep;
pub mod tensor;
pub mod toy;
