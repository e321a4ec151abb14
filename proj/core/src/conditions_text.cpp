#include "conditions_text.hpp"

namespace clin::detail {

// Real conditions as printed for the ode class, character for character.
const std::array<const char*, 4> kPrintedOde{
    "12*A1_xx + 12*C1*A1_x - 12*A2_x*C2 - 6*A1_f*D1 - 6*D1*A2_g + 6*D2*A2_f - 6*D2*A1_g"
    " + 12*A1*C1_x - 12*A2*C2_x + C1_ff - C1_gg + 2*C2_fg - 12*A1*D1_f - 12*A1*D2_g"
    " + 12*A2*D2_f - 12*A2*D1_g + 2*B1*C1_f + 2*B1*C2_g - 2*B2*C2_f + 2*B2*C1_g - 8*B1*B1_x"
    " + 8*B2*B2_x - 4*B1_xf - 4*B2_xg",

    "12*A2_xx + 12*C2*A1_x + 12*A2_x*C1 - 6*D2*A1_f - 6*D2*A2_g - 6*D1*A2_f + 6*D1*A1_g"
    " + 12*A2*C1_x + 12*A1*C2_x + C2_ff - C2_gg - 2*C1_fg - 12*A2*D1_f - 12*A2*D2_g"
    " - 12*A1*D2_f + 12*A1*D1_g + 2*B2*C1_f + 2*B2*C2_g + 2*B1*C2_f - 2*B1*C1_g - 8*B2*B1_x"
    " - 8*B1*B2_x - 4*B2_xf + 4*B1_xg",

    "24*D1*A1_x - 24*D2*A2_x - 6*D1*B1_f - 6*D1*B2_g + 6*D2*B2_f - 6*D2*B1_g"
    " + 12*A1*D1_x - 12*A2*D2_x + 4*B1_xx - 4*C1_xf - 4*C2_xg - 6*B1*D1_f - 6*B1*D2_g"
    " + 6*B2*D2_g - 6*B2*D1_g + 3*D1_ff - 3*D1_gg + 6*D2_fg + 4*C1*C1_f + 4*C1*C2_g"
    " - 4*C2*C2_f + 4*C2*C1_g - 4*C1*B1_x + 4*C2*B2_x",

    "24*D2*A1_x + 24*D1*A2_x - 6*D2*B1_f - 6*D2*B2_g - 6*D1*B2_f + 6*D1*B1_g"
    " + 12*A2*D1_x + 12*A1*D2_x + 4*B2_xx - 4*C2_xf + 4*C1_xg - 6*B2*D1_f - 6*B2*D2_g"
    " - 6*B1*D2_f + 6*B1*D1_g + 3*D2_ff - 3*D2_gg - 6*D1_fg + 4*C2*C1_f - 4*C2*C2_g"
    " + 4*C1*C2_f - 4*C1*C1_g - 4*C2*B1_x - 4*C1*B2_x",
};

// Real conditions as printed for the pde class.
const std::array<const char*, 4> kPrintedPde{
    "3*A1_xx - 3*A1_yy + 6*A2_xy + 6*C1*A1_x + 6*C1*A2_y - 6*A2_x*C2 + 6*C2*A1_y"
    " - 6*A1_f*D1 - 6*D1*A2_g + 6*D2*A2_f - 6*D2*A1_g + 6*A1*C1_x + 6*A1*C2_y - 6*A2*C2_y"
    " + 6*A2*C1_x + C1_ff - C1_gg + 2*C2_fg - 12*A1*D1_f - 12*A1*D2_g + 12*A2*D2_f - 12*A2*D1_g"
    " + 2*B1*C1_f + 2*B1*C2_g - 2*B2*C2_f + 2*B2*C1_g - 4*B1*B1_x - 4*B1*B2_y + 4*B2*B2_x - 4*B2*B1_y"
    " - 2*B1_xf - 2*B2_yf - 2*B2_xg + 2*B1_yg",

    "3*A2_xx - 3*A2_yy - 6*A1_xy + 6*C2*A1_x + 6*C2*A2_y + 6*A2_x*C1 - 6*C1*A1_y"
    " - 6*D2*A1_f - 6*D2*A2_g - 6*D1*A2_f + 6*D1*A1_g + 6*A2*C1_x + 6*A2*C2_y + 6*A1*C2_y"
    " - 6*A1*C1_x + C2_ff - C2_gg - 2*C1_fg - 12*A2*D1_f - 12*A2*D2_g - 12*A1*D2_f + 12*A1*D1_g"
    " + 2*B2*C1_f + 2*B2*C2_g + 2*B1*C2_f - 2*B1*C1_g - 4*B2*B1_x - 4*B2*B2_y - 4*B1*B2_x"
    " + 4*B1*B1_y - 2*B2_xf + 2*B1_yf + 2*B1_xg - 2*B2_yg",

    "12*D1*A1_x + 12*D1*A2_y - 12*D2*A2_x + 12*D2*A1_y - 6*D1*B1_f - 6*D1*B2_g"
    " + 6*D2*B2_f - 6*D2*B1_g + 6*A1*D1_x + 6*A1*D2_y - 6*A2*D2_x + 6*A2*D1_y"
    " + B1_xx - B1_yy + 2*B2_xy - 2*C1_xf - 2*C2_yf - 2*C2_xg + 2*C1_yg - 6*B1*D1_f"
    " - 6*B1*D2_g + 6*B2*D2_f - 6*B2*D1_g + 3*D1_ff - 3*D1_gg + 6*D2_fg + 4*C1*C1_f"
    " + 4*C1*C2_g - 4*C2*C2_f + 4*C2*C1_g - 2*C1*B1_x - 2*C1*B2_y + 2*C2*B2_x - 2*C2*B1_y",

    "12*D2*A1_x + 12*D2*A2_y + 12*D1*A2_x - 12*D1*A1_y - 6*D2*B1_f - 6*D2*B2_g"
    " - 6*D1*B2_f + 6*D1*B1_g + 6*A2*D1_x + 6*A2*D2_y + 6*A1*D2_x - 6*A1*D1_y"
    " + B2_xx - B2_yy - 2*B1_xy - 2*C2_xf + 2*C1_yf + 2*C1_xg + 2*C2_yg - 6*B2*D1_f"
    " - 6*B2*D2_g - 6*B1*D2_f + 6*B1*D1_g + 3*D2_ff - 3*D2_gg - 6*D1_fg + 4*C2*C1_f"
    " + 4*C2*C2_g + 4*C1*C2_f - 4*C1*C1_g - 2*C2*B1_x - 2*C2*B2_y - 2*C1*B2_x + 2*C1*B1_y",
};

}  // namespace clin::detail
