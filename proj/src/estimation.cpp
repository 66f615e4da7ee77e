#include "dfbm/estimation.hpp"

namespace dfbm {

std::string_view method_name(Method m) noexcept {
    return m == Method::ml ? "ML" : "AAM";
}

}  // namespace dfbm
