//! Component codes, product-code construction, CRCs and packet framing.

mod component;
mod crc;
mod framing;
mod product;

pub use component::{ComponentCode, HddStatus};
pub use crc::CrcSpec;
pub use framing::{build_packet, DecoderMode, Detection, HarqConfig};
pub(crate) use framing::encode_subpacket;
pub use product::{encode_product, is_product_codeword, ProductCodeword};
