#ifndef CXGDIAL_VERSION_HPP
#define CXGDIAL_VERSION_HPP

namespace cxgdial {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cxgdial

#endif  // CXGDIAL_VERSION_HPP
