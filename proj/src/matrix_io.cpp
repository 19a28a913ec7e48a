#include "vnlab/matrix_io.hpp"

#include <cstdio>

#include "vnlab/errors.hpp"

namespace vnlab {

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
    require_square(m, "matrix_to_json");
    const Index n = m.rows();
    std::vector<double> re, im;
    re.reserve(static_cast<std::size_t>(n * n));
    im.reserve(static_cast<std::size_t>(n * n));
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            re.push_back(m(i, j).real());
            im.push_back(m(i, j).imag());
        }
    return {{"dim", n}, {"re", re}, {"im", im}};
}

ComplexMatrix matrix_from_json(const nlohmann::json& j) {
    try {
        const auto n = j.at("dim").get<Index>();
        const auto re = j.at("re").get<std::vector<double>>();
        const auto im = j.at("im").get<std::vector<double>>();
        if (n < 1 || re.size() != static_cast<std::size_t>(n * n) || im.size() != re.size())
            throw Error(ErrorKind::InvalidArgument, "matrix_from_json", "array lengths do not match dim^2");
        ComplexMatrix m(n, n);
        for (Index i = 0; i < n; ++i)
            for (Index k = 0; k < n; ++k) {
                const auto at = static_cast<std::size_t>(i * n + k);
                m(i, k) = Complex(re[at], im[at]);
            }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, "matrix_from_json", e.what());
    }
}

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

}  // namespace vnlab
