#include "bevrisk/simd_kernels.hpp"

namespace bevrisk::simd {

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
  }
  return "?";
}

bool backend_available(Backend b) {
  switch (b) {
    case Backend::Scalar: return true;
    case Backend::Avx2:
#if defined(BEVRISK_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::Scalar, Backend::Avx2}) {
    if (backend_available(b)) out.push_back(b);
  }
  return out;
}

const KernelTable& kernels(Backend b) {
#if defined(BEVRISK_HAVE_AVX2)
  if (b == Backend::Avx2 && backend_available(b)) return detail::kAvx2Table;
#endif
  (void)b;
  return detail::kScalarTable;
}

const KernelTable& active_kernels() {
  static const KernelTable& table = kernels(backend_available(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar);
  return table;
}

}  // namespace bevrisk::simd
