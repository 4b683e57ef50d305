#ifndef FFB_VERSION_HPP
#define FFB_VERSION_HPP

namespace ffb {
inline constexpr const char* version_string = "0.1.0";
}

#endif
