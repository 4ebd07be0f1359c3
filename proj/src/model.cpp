#include "hcran/model.hpp"

#include <cmath>
#include <sstream>

namespace hcran {

namespace {

void require(bool cond, const char* what) {
    if (!cond) throw ConfigError(what);
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void NetworkConfig::validate() const {
    require(num_rrh >= 1, "num_rrh must be >= 1");
    require(num_hue >= 1, "num_hue must be >= 1");
    require(num_rue >= 1, "num_rue must be >= 1");
    require(num_rb_rrh >= 1, "num_rb_rrh must be >= 1");
    // The HPN tier may be empty in reduced instances; the default layout has 8.
    require(positive_finite(bandwidth_total), "bandwidth_total must be > 0");
    require(positive_finite(bandwidth_rb), "bandwidth_rb must be > 0");
    require(positive_finite(slot_duration), "slot_duration must be > 0");
    require(positive_finite(p_max_rrh), "p_max_rrh must be > 0");
    require(positive_finite(p_max_hpn), "p_max_hpn must be > 0");
    require(positive_finite(drain_eff_rrh), "drain_eff_rrh must be > 0");
    require(positive_finite(drain_eff_hpn), "drain_eff_hpn must be > 0");
    require(positive_finite(static_power_rrh), "static_power_rrh must be > 0");
    require(positive_finite(static_power_hpn), "static_power_hpn must be > 0");
    require(std::isfinite(ee_required) && ee_required >= 0.0, "ee_required must be >= 0");
    require(std::isfinite(control_v) && control_v >= 0.0, "control_v must be >= 0");
    require(positive_finite(price_rue), "price_rue must be > 0");
    require(positive_finite(price_hue), "price_hue must be > 0");
    require(positive_finite(a_max_hue), "a_max_hue must be > 0");
    require(positive_finite(a_max_rue), "a_max_rue must be > 0");
    if (utility_kind == UtilityKind::Logarithmic)
        require(positive_finite(utility_scale), "utility_scale must be > 0");

    const double spanned = static_cast<double>(num_rb_rrh + num_rb_hpn) * bandwidth_rb;
    if (std::abs(spanned - bandwidth_total) > 1e-9 * bandwidth_total) {
        std::ostringstream os;
        os << "RB partition spans " << spanned << " Hz but bandwidth_total is "
           << bandwidth_total << " Hz";
        throw ConfigError(os.str());
    }
}

double NetworkConfig::phi_r() const {
    return utility_kind == UtilityKind::Linear ? 1.0 : 1.0 / utility_scale;
}

double NetworkConfig::phi_h() const { return phi_r(); }

double NetworkConfig::utility(double r) const {
    if (utility_kind == UtilityKind::Linear) return r;
    return std::log1p(r / utility_scale);
}

double NetworkConfig::queue_bound_rue() const {
    return control_v * price_rue * phi_r() + 2.0 * a_max_rue;
}

double NetworkConfig::queue_bound_hue() const {
    return control_v * price_hue * phi_h() + 2.0 * a_max_hue;
}

ChannelState ChannelState::zeros(const NetworkConfig& cfg) {
    ChannelState ch;
    ch.g_rrh_rue = Array3<double>(cfg.num_rrh, cfg.num_rue, cfg.num_rb_rrh);
    ch.g_rrh_hue = Array3<double>(cfg.num_rrh, cfg.num_hue, cfg.num_rb_rrh);
    ch.g_hpn_hue = Array2<double>(cfg.num_hue, cfg.num_rb_hpn);
    return ch;
}

void ChannelState::check_shape(const NetworkConfig& cfg) const {
    if (!g_rrh_rue.has_shape(cfg.num_rrh, cfg.num_rue, cfg.num_rb_rrh) ||
        !g_rrh_hue.has_shape(cfg.num_rrh, cfg.num_hue, cfg.num_rb_rrh) ||
        !g_hpn_hue.has_shape(cfg.num_hue, cfg.num_rb_hpn))
        throw ShapeError("channel state dimensions do not match the network config");
}

ControlDecision ControlDecision::zeros(const NetworkConfig& cfg) {
    ControlDecision d;
    d.admit_hue.assign(cfg.num_hue, 0.0);
    d.admit_rue.assign(cfg.num_rue, 0.0);
    d.aux_hue.assign(cfg.num_hue, 0.0);
    d.aux_rue.assign(cfg.num_rue, 0.0);
    d.assoc.assign(cfg.num_hue, 0);
    d.rb_rue = Array2<std::uint8_t>(cfg.num_rue, cfg.num_rb_rrh);
    d.rb_hue_rrh = Array2<std::uint8_t>(cfg.num_hue, cfg.num_rb_rrh);
    d.rb_hue_hpn = Array2<std::uint8_t>(cfg.num_hue, cfg.num_rb_hpn);
    d.pw_rue = Array3<double>(cfg.num_rrh, cfg.num_rue, cfg.num_rb_rrh);
    d.pw_hue_rrh = Array3<double>(cfg.num_rrh, cfg.num_hue, cfg.num_rb_rrh);
    d.pw_hue_hpn = Array2<double>(cfg.num_hue, cfg.num_rb_hpn);
    d.theta.assign(cfg.num_rrh + 1, 0.0);
    return d;
}

void ControlDecision::check_shape(const NetworkConfig& cfg) const {
    const bool ok = admit_hue.size() == cfg.num_hue && admit_rue.size() == cfg.num_rue &&
                    aux_hue.size() == cfg.num_hue && aux_rue.size() == cfg.num_rue &&
                    assoc.size() == cfg.num_hue &&
                    rb_rue.has_shape(cfg.num_rue, cfg.num_rb_rrh) &&
                    rb_hue_rrh.has_shape(cfg.num_hue, cfg.num_rb_rrh) &&
                    rb_hue_hpn.has_shape(cfg.num_hue, cfg.num_rb_hpn) &&
                    pw_rue.has_shape(cfg.num_rrh, cfg.num_rue, cfg.num_rb_rrh) &&
                    pw_hue_rrh.has_shape(cfg.num_rrh, cfg.num_hue, cfg.num_rb_rrh) &&
                    pw_hue_hpn.has_shape(cfg.num_hue, cfg.num_rb_hpn);
    if (!ok) throw ShapeError("control decision dimensions do not match the network config");
}

double rate_rue(const NetworkConfig& cfg, const ChannelState& ch, const ControlDecision& d,
                std::size_t j) {
    ch.check_shape(cfg);
    d.check_shape(cfg);
    if (j >= cfg.num_rue) throw ShapeError("RUE index out of range");
    double rate = 0.0;
    for (std::size_t k = 0; k < cfg.num_rb_rrh; ++k) {
        if (!d.rb_rue(j, k)) continue;
        double snr = 0.0;
        for (std::size_t i = 0; i < cfg.num_rrh; ++i) snr += d.pw_rue(i, j, k) * ch.g_rrh_rue(i, j, k);
        rate += cfg.bandwidth_rb * std::log2(1.0 + snr);
    }
    return rate;
}

double rate_hue(const NetworkConfig& cfg, const ChannelState& ch, const ControlDecision& d,
                std::size_t m) {
    ch.check_shape(cfg);
    d.check_shape(cfg);
    if (m >= cfg.num_hue) throw ShapeError("HUE index out of range");
    double rate = 0.0;
    if (d.assoc[m]) {
        for (std::size_t k = 0; k < cfg.num_rb_rrh; ++k) {
            if (!d.rb_hue_rrh(m, k)) continue;
            double snr = 0.0;
            for (std::size_t i = 0; i < cfg.num_rrh; ++i)
                snr += d.pw_hue_rrh(i, m, k) * ch.g_rrh_hue(i, m, k);
            rate += cfg.bandwidth_rb * std::log2(1.0 + snr);
        }
    } else {
        for (std::size_t l = 0; l < cfg.num_rb_hpn; ++l) {
            if (!d.rb_hue_hpn(m, l)) continue;
            rate += cfg.bandwidth_rb * std::log2(1.0 + ch.g_hpn_hue(m, l) * d.pw_hue_hpn(m, l));
        }
    }
    return rate;
}

double rate_sum(const NetworkConfig& cfg, const ChannelState& ch, const ControlDecision& d) {
    double sum = 0.0;
    for (std::size_t m = 0; m < cfg.num_hue; ++m) sum += rate_hue(cfg, ch, d, m);
    for (std::size_t j = 0; j < cfg.num_rue; ++j) sum += rate_rue(cfg, ch, d, j);
    return sum;
}

PowerTotals power_totals(const NetworkConfig& cfg, const ControlDecision& d) {
    d.check_shape(cfg);
    PowerTotals out;
    out.per_rrh.assign(cfg.num_rrh, 0.0);
    for (std::size_t i = 0; i < cfg.num_rrh; ++i) {
        double p = 0.0;
        for (std::size_t k = 0; k < cfg.num_rb_rrh; ++k) {
            for (std::size_t j = 0; j < cfg.num_rue; ++j)
                if (d.rb_rue(j, k)) p += d.pw_rue(i, j, k);
            for (std::size_t m = 0; m < cfg.num_hue; ++m)
                if (d.assoc[m] && d.rb_hue_rrh(m, k)) p += d.pw_hue_rrh(i, m, k);
        }
        out.per_rrh[i] = p;
    }
    for (std::size_t m = 0; m < cfg.num_hue; ++m) {
        if (d.assoc[m]) continue;
        for (std::size_t l = 0; l < cfg.num_rb_hpn; ++l)
            if (d.rb_hue_hpn(m, l)) out.hpn += d.pw_hue_hpn(m, l);
    }
    double sum = cfg.static_power_rrh + cfg.drain_eff_hpn * out.hpn + cfg.static_power_hpn;
    for (double p : out.per_rrh) sum += cfg.drain_eff_rrh * p;
    out.sum = sum;
    return out;
}

double instantaneous_ee(double mu_sum, double p_sum, const NetworkConfig& cfg) {
    if (!(p_sum > 0.0)) throw std::invalid_argument("p_sum must be positive");
    return mu_sum / (cfg.bandwidth_total * p_sum);
}

void check_feasibility(const NetworkConfig& cfg, const ControlDecision& d, double tol) {
    d.check_shape(cfg);
    auto fail = [](const std::string& msg) { throw FeasibilityError(msg); };
    auto is_binary = [](std::uint8_t v) { return v == 0 || v == 1; };

    for (std::size_t m = 0; m < cfg.num_hue; ++m)
        if (!is_binary(d.assoc[m])) fail("association indicator is not binary");

    for (std::size_t k = 0; k < cfg.num_rb_rrh; ++k) {
        int users = 0;
        for (std::size_t j = 0; j < cfg.num_rue; ++j) {
            if (!is_binary(d.rb_rue(j, k))) fail("RUE RB indicator is not binary");
            users += d.rb_rue(j, k);
        }
        for (std::size_t m = 0; m < cfg.num_hue; ++m) {
            if (!is_binary(d.rb_hue_rrh(m, k))) fail("HUE RRH-tier RB indicator is not binary");
            users += d.assoc[m] * d.rb_hue_rrh(m, k);
        }
        if (users > 1) fail("RRH-tier RB " + std::to_string(k) + " is reused");
    }
    for (std::size_t l = 0; l < cfg.num_rb_hpn; ++l) {
        int users = 0;
        for (std::size_t m = 0; m < cfg.num_hue; ++m) {
            if (!is_binary(d.rb_hue_hpn(m, l))) fail("HPN RB indicator is not binary");
            users += (1 - d.assoc[m]) * d.rb_hue_hpn(m, l);
        }
        if (users > 1) fail("HPN RB " + std::to_string(l) + " is reused");
    }

    for (double p : d.pw_rue.data())
        if (!(std::isfinite(p) && p >= 0.0)) fail("negative or non-finite RUE power");
    for (double p : d.pw_hue_rrh.data())
        if (!(std::isfinite(p) && p >= 0.0)) fail("negative or non-finite HUE power");
    for (double p : d.pw_hue_hpn.data())
        if (!(std::isfinite(p) && p >= 0.0)) fail("negative or non-finite HPN power");

    for (std::size_t i = 0; i < cfg.num_rrh; ++i)
        for (std::size_t k = 0; k < cfg.num_rb_rrh; ++k) {
            for (std::size_t j = 0; j < cfg.num_rue; ++j)
                if (!d.rb_rue(j, k) && d.pw_rue(i, j, k) != 0.0) fail("power on an unallocated RUE RB");
            for (std::size_t m = 0; m < cfg.num_hue; ++m)
                if (!(d.assoc[m] && d.rb_hue_rrh(m, k)) && d.pw_hue_rrh(i, m, k) != 0.0)
                    fail("power on an unallocated HUE RRH-tier RB");
        }
    for (std::size_t m = 0; m < cfg.num_hue; ++m)
        for (std::size_t l = 0; l < cfg.num_rb_hpn; ++l)
            if (!(!d.assoc[m] && d.rb_hue_hpn(m, l)) && d.pw_hue_hpn(m, l) != 0.0)
                fail("power on an unallocated HPN RB");

    const PowerTotals pt = power_totals(cfg, d);
    for (std::size_t i = 0; i < cfg.num_rrh; ++i)
        if (pt.per_rrh[i] > cfg.p_max_rrh + tol)
            fail("RRH " + std::to_string(i) + " exceeds its power limit");
    if (pt.hpn > cfg.p_max_hpn + tol) fail("HPN exceeds its power limit");
}

}  // namespace hcran
