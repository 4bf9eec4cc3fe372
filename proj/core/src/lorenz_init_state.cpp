#include <array>

#include "gpsl/simulators.hpp"

namespace gpsl {

namespace {

// Frozen output of lorenz_spin_up_state(): 1000 RK4 steps of the unforced
// system from a rest state with a 0.01 kick on the first site. These
// constants are normative; a test compares them against a fresh spin-up and
// flags any drift in the generating code or toolchain.
constexpr std::array<double, 40> kInitialState = {
    -0.81864152233461074,
    0.60160833151116855,
    3.8606083759018235,
    6.8303747117270008,
    -3.4192784553605726,
    1.6917616970175833,
    -1.3648497131508797,
    6.9005198925723255,
    12.180442256857711,
    2.1952684648619987,
    2.2406596294482934,
    -4.9157280730290145,
    -0.75228454617888352,
    0.38945663019652954,
    8.7666268698047229,
    10.060144621842122,
    -3.4817712811825965,
    -2.7655686613946497,
    2.9384610556762669,
    1.5510250708350792,
    1.9239855987801253,
    6.3937633986235678,
    -1.4898088763638406,
    3.6381573679962349,
    -3.0456185124063415,
    0.42310583662302154,
    6.6755335198714105,
    2.7162871365794956,
    4.0772987418552118,
    7.6066274543786951,
    -0.071987231320202683,
    4.4861411984889514,
    7.2623752911836856,
    2.6028590513654315,
    -2.2649787033989868,
    -1.6791072334333228,
    0.10118111221600568,
    8.6930742274960799,
    -2.3154951781954249,
    -3.2399463171236391,
};

}  // namespace

const Eigen::VectorXd& lorenz_initial_state() {
  static const Eigen::VectorXd state =
      Eigen::Map<const Eigen::VectorXd>(kInitialState.data(), kInitialState.size());
  return state;
}

}  // namespace gpsl
