//! Zero-initialized `i64` storage for cyclotomic coefficients.
//!
//! Large buffers come from anonymous memory maps. The kernel hands out zero
//! pages lazily, so a fresh element of a big ring costs a constant amount of
//! work until coefficients are touched; a heap `calloc` of the same size may be
//! served from recycled memory and cleared eagerly.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Deref, DerefMut};

use memmap2::MmapMut;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

// 512 KiB; below this a heap allocation is cheap either way.
const MAP_THRESHOLD: usize = 1 << 16;

pub(crate) enum Coeffs {
    Heap(Vec<i64>),
    Mapped { map: MmapMut, len: usize },
}

impl Coeffs {
    pub(crate) fn zeroed(len: usize) -> Self {
        if len >= MAP_THRESHOLD {
            if let Ok(map) = MmapMut::map_anon(len * std::mem::size_of::<i64>()) {
                return Coeffs::Mapped { map, len };
            }
        }
        Coeffs::Heap(vec![0; len])
    }
}

impl From<Vec<i64>> for Coeffs {
    fn from(v: Vec<i64>) -> Self {
        Coeffs::Heap(v)
    }
}

impl Deref for Coeffs {
    type Target = [i64];

    fn deref(&self) -> &[i64] {
        match self {
            Coeffs::Heap(v) => v,
            Coeffs::Mapped { map, len } => &bytemuck::cast_slice(&map[..])[..*len],
        }
    }
}

impl DerefMut for Coeffs {
    fn deref_mut(&mut self) -> &mut [i64] {
        match self {
            Coeffs::Heap(v) => v,
            Coeffs::Mapped { map, len } => &mut bytemuck::cast_slice_mut(&mut map[..])[..*len],
        }
    }
}

impl Clone for Coeffs {
    fn clone(&self) -> Self {
        let mut out = Coeffs::zeroed(self.len());
        out.copy_from_slice(self);
        out
    }
}

impl PartialEq for Coeffs {
    fn eq(&self, other: &Self) -> bool {
        **self == **other
    }
}

impl Eq for Coeffs {}

impl Hash for Coeffs {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (**self).hash(state);
    }
}

impl fmt::Debug for Coeffs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        (**self).fmt(f)
    }
}

impl Serialize for Coeffs {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (**self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Coeffs {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Vec::<i64>::deserialize(deserializer).map(Coeffs::Heap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mapped_buffers_start_zero_and_are_writable() {
        let mut c = Coeffs::zeroed(MAP_THRESHOLD * 2 + 3);
        assert!(matches!(c, Coeffs::Mapped { .. }));
        assert_eq!(c.len(), MAP_THRESHOLD * 2 + 3);
        assert!(c.iter().all(|&x| x == 0));
        c[7] = -4;
        let last = c.len() - 1;
        c[last] = 9;
        let d = c.clone();
        assert_eq!(c, d);
        assert_eq!((d[7], d[last]), (-4, 9));
    }

    #[test]
    fn heap_and_mapped_compare_by_content() {
        let mut mapped = Coeffs::zeroed(MAP_THRESHOLD);
        let mut heap = Coeffs::from(vec![0; MAP_THRESHOLD]);
        mapped[3] = 1;
        assert_ne!(mapped, heap);
        heap[3] = 1;
        assert_eq!(mapped, heap);
    }
}
