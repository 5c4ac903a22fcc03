#pragma once

// Umbrella header for the jigsaw secure data-transfer toolkit.

#include "jigsaw/bitstring.hpp"
#include "jigsaw/block.hpp"
#include "jigsaw/channel.hpp"
#include "jigsaw/codec.hpp"
#include "jigsaw/costmodel.hpp"
#include "jigsaw/errors.hpp"
#include "jigsaw/framing.hpp"
#include "jigsaw/keystate.hpp"
#include "jigsaw/random.hpp"
#include "jigsaw/sha256.hpp"
#include "jigsaw/tearing.hpp"
#include "jigsaw/transport.hpp"
#include "jigsaw/wire.hpp"
