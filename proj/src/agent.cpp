#include "contagion/agent.hpp"

#include <stdexcept>

namespace contagion {

AgentProfile::AgentProfile(SignalStructure signal_, double cost_, bool informed_)
    : signal(signal_), cost(cost_), informed(informed_) {
    if (!(cost >= 0.0)) {
        throw std::invalid_argument("AgentProfile: link cost must be non-negative");
    }
}

}  // namespace contagion
