#pragma once

#include "rendezvous/chalgos.hpp"
#include "rendezvous/core.hpp"
#include "rendezvous/instances.hpp"
#include "rendezvous/io.hpp"
#include "rendezvous/oracle.hpp"
#include "rendezvous/random.hpp"
#include "rendezvous/simengine.hpp"
#include "rendezvous/theory.hpp"
