#include "divopt/candidate.hpp"

#include <algorithm>
#include <cmath>

namespace divopt {

void BandStructure::check() const {
    if (bands.empty()) raise(Errc::DomainError, "band structure is empty");
    for (std::size_t k = 0; k < bands.size(); ++k) {
        const Band& b = bands[k];
        if (!(b.bottom <= b.top)) raise(Errc::DomainError, "band bottom above its top");
        if (b.bottom == b.top && b.top != 0.0 && k + 1 != bands.size() && k != 0)
            raise(Errc::DomainError, "degenerate interior band");
        if (k > 0) {
            if (!(bands[k - 1].bottom < b.bottom))
                raise(Errc::DomainError, "band bottoms must increase");
            if (!(bands[k - 1].top <= b.bottom))
                raise(Errc::DomainError, "bands overlap");
        }
    }
}

double CandidateValue::gamma_at(double x) const {
    if (gamma.empty()) return 0.0;
    const Grid& g = core.grid;
    if (x <= 0.0) return gamma.front();
    if (x >= g.x_max) return gamma.back();
    const int i = g.cell_of(x);
    const double t = (x - g.x(i)) / g.h;
    return gamma[(std::size_t)i] * (1.0 - t) + gamma[(std::size_t)i + 1] * t;
}

} // namespace divopt
