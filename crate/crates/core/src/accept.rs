//! (stub, under construction)
