#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace snlab {

enum class ErrorCode {
    domain,
    singularity,
    no_convergence,
    degenerate_saddle_node,
    orientation,
    continuation_lost,
    displacement_sign,
    quadrature_nonmonotone,
    out_of_domain,
    bracket_loss,
    backward_solve,
    empty_interval,
    orbit_escape,
    sample_escape,
    no_root_in_rung,
    insufficient_points,
    unsupported_geometry,
    parse,
    validation,
    io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace snlab
